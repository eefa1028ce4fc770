"""Closed interpreter for the schematic program surface.

Programs are parsed with the `ast` module against a strict whitelist --
they are never executed as Python. The executor places symbols and
labels, resolves pin queries, routes `connect_pins` requests with
L-shaped wires, and assembles a `Schematic`.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .codegen import (AddLabel, AddNewWire, AddSymbol, AnchorRef, Command,
                      ConnectPins, CoordExpr, Literal, PinAnchor, Program,
                      SetAnchor, WriteOutAllWires)
from .errors import ProgramSyntaxError
from .geometry import (Point, collinear_overlap_length, point_inside_segment,
                       quantize, snap_point)
from .model import (DEFAULT_VERSION, LabelInstance, Schematic, SymbolInstance,
                    WireSegment, Junction)
from .symbols import (SymbolDef, SymbolLibrary, pin_world_location,
                      resolve_pin, PinDef)
from . import errors as _errors

COORD_MIN = 0.0
COORD_MAX = 10000.0
LABEL_STUB = 2.54

_API_NAMES = {
    "add_schematic_symbol",
    "add_label",
    "connect_pins",
    "add_new_wire",
    "write_out_all_wires",
}

_ANCHOR_X_RE = re.compile(r"^center_x_(\d+)$")
_ANCHOR_Y_RE = re.compile(r"^center_y_(\d+)$")

_ROTATIONS = {0, 90, 180, 270}
_MIRRORS = {"None": "none", "x": "x", "y": "y"}
_LABEL_TYPES = {"local", "global_input", "global_output",
                "global_bidirectional", "global_passive"}


@dataclass(frozen=True)
class ExecError:
    code: str
    message: str
    line: int = 0
    command_index: int = -1

    @property
    def kind(self) -> str:
        return self.code

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message,
                "line": self.line, "command_index": self.command_index}


@dataclass
class Diagnostics:
    errors: List[ExecError] = field(default_factory=list)
    warnings: List[ExecError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "errors": [e.to_json() for e in self.errors],
            "warnings": [w.to_json() for w in self.warnings],
        }


class _Abort(Exception):
    pass


# ---------------------------------------------------------------------------
# Parsing


def parse_program(text: str) -> Program:
    """Parse program text into a Program; raises ProgramSyntaxError."""
    try:
        module = ast.parse(text)
    except SyntaxError as exc:
        raise ProgramSyntaxError(exc.lineno or 0, exc.msg or "invalid syntax")

    commands: List[Command] = []
    anchors: Dict[int, Tuple[float, float]] = {}
    lines: List[int] = []
    for stmt in module.body:
        # Header statements before the first command (imports, sys.path
        # setup, anything else) are inert: tolerated but never executed.
        if not commands and not _is_command_stmt(stmt):
            continue
        command = _parse_statement(stmt, anchors)
        commands.append(command)
        lines.append(stmt.lineno)

    for i, command in enumerate(commands):
        if isinstance(command, WriteOutAllWires) and i != len(commands) - 1:
            raise ProgramSyntaxError(
                lines[i], "write_out_all_wires must be the final command")

    return Program(commands=commands, level=_infer_level(commands),
                   lines=lines)


def _is_command_stmt(stmt: ast.stmt) -> bool:
    if isinstance(stmt, ast.Assign):
        return _is_anchor_target(stmt)
    if isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call):
        func = stmt.value.func
        return isinstance(func, ast.Name) and func.id in _API_NAMES
    return False


def _is_anchor_target(stmt: ast.Assign) -> bool:
    if len(stmt.targets) != 1 or not isinstance(stmt.targets[0], ast.Tuple):
        return False
    return any(isinstance(el, ast.Name)
               and (_ANCHOR_X_RE.match(el.id) or _ANCHOR_Y_RE.match(el.id))
               for el in stmt.targets[0].elts)


def _infer_level(commands: Sequence[Command]) -> str:
    has_wires = any(isinstance(c, AddNewWire) for c in commands)
    has_connects = any(isinstance(c, ConnectPins) for c in commands)
    if has_wires and has_connects:
        raise ProgramSyntaxError(
            0, "a program may not mix connect_pins with add_new_wire")
    if has_wires:
        return "L3"
    if _uses_offsets(commands):
        return "L1"
    return "L2"


def _uses_offsets(commands: Sequence[Command]) -> bool:
    def offset_coord(coord: CoordExpr) -> bool:
        return isinstance(coord, AnchorRef) and coord.offset is not None

    for command in commands:
        if isinstance(command, AddSymbol):
            if offset_coord(command.x) or offset_coord(command.y):
                return True
        elif isinstance(command, AddLabel):
            if isinstance(command.pos, PinAnchor):
                return True
            if offset_coord(command.pos[0]) or offset_coord(command.pos[1]):
                return True
    return False


def _parse_statement(stmt: ast.stmt,
                     anchors: Dict[int, Tuple[float, float]]) -> Command:
    if isinstance(stmt, ast.Assign):
        return _parse_anchor(stmt, anchors)
    if isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call):
        return _parse_call(stmt.value, anchors)
    raise ProgramSyntaxError(stmt.lineno,
                             f"statement not allowed: {ast.unparse(stmt)!r}")


def _parse_anchor(stmt: ast.Assign,
                  anchors: Dict[int, Tuple[float, float]]) -> SetAnchor:
    line = stmt.lineno
    if len(stmt.targets) != 1 or not isinstance(stmt.targets[0], ast.Tuple):
        raise ProgramSyntaxError(line, "only anchor assignments are allowed")
    targets = stmt.targets[0].elts
    if len(targets) != 2 or not all(isinstance(t, ast.Name) for t in targets):
        raise ProgramSyntaxError(line, "anchor assignment needs two names")
    match_x = _ANCHOR_X_RE.match(targets[0].id)
    match_y = _ANCHOR_Y_RE.match(targets[1].id)
    if not match_x or not match_y or match_x.group(1) != match_y.group(1):
        raise ProgramSyntaxError(
            line, "anchor assignment must be 'center_x_k, center_y_k = x, y'")
    index = int(match_x.group(1))
    if index in anchors:
        raise ProgramSyntaxError(line, f"anchor {index} redefined")
    if not isinstance(stmt.value, ast.Tuple) or len(stmt.value.elts) != 2:
        raise ProgramSyntaxError(line, "anchor assignment needs two values")
    x = _number(stmt.value.elts[0], line)
    y = _number(stmt.value.elts[1], line)
    anchors[index] = (x, y)
    return SetAnchor(index, x, y)


def _parse_call(call: ast.Call,
                anchors: Dict[int, Tuple[float, float]]) -> Command:
    line = call.lineno
    if not isinstance(call.func, ast.Name):
        raise ProgramSyntaxError(line, "only plain function calls are allowed")
    name = call.func.id
    if name == "add_schematic_symbol":
        return _parse_add_symbol(call, anchors)
    if name == "add_label":
        return _parse_add_label(call, anchors)
    if name == "connect_pins":
        return _parse_connect(call)
    if name == "add_new_wire":
        return _parse_add_wire(call)
    if name == "write_out_all_wires":
        if call.args or call.keywords:
            raise ProgramSyntaxError(line,
                                     "write_out_all_wires takes no arguments")
        return WriteOutAllWires()
    raise ProgramSyntaxError(line, f"unknown function {name!r}")


def _bind(call: ast.Call, names: Sequence[str], required: Sequence[str],
          line: int) -> Dict[str, ast.expr]:
    bound: Dict[str, ast.expr] = {}
    if len(call.args) > len(names):
        raise ProgramSyntaxError(line, "too many positional arguments")
    for name, value in zip(names, call.args):
        bound[name] = value
    for keyword in call.keywords:
        if keyword.arg is None or keyword.arg not in names:
            raise ProgramSyntaxError(
                line, f"unexpected keyword argument {keyword.arg!r}")
        if keyword.arg in bound:
            raise ProgramSyntaxError(
                line, f"duplicate argument {keyword.arg!r}")
        bound[keyword.arg] = keyword.value
    for name in required:
        if name not in bound:
            raise ProgramSyntaxError(line, f"missing argument {name!r}")
    return bound


def _parse_add_symbol(call: ast.Call,
                      anchors: Dict[int, Tuple[float, float]]) -> AddSymbol:
    line = call.lineno
    names = ("symbol_lib", "symbol_name", "pos_x", "pos_y", "reference",
             "value", "rotation", "mirror")
    required = ("symbol_lib", "symbol_name", "pos_x", "pos_y", "reference",
                "value")
    bound = _bind(call, names, required, line)
    rotation = int(_number(bound["rotation"], line)) \
        if "rotation" in bound else 0
    if rotation not in _ROTATIONS:
        raise ProgramSyntaxError(line, f"invalid rotation {rotation}")
    mirror_text = _string(bound["mirror"], line) if "mirror" in bound \
        else "None"
    if mirror_text not in _MIRRORS:
        raise ProgramSyntaxError(line, f"invalid mirror {mirror_text!r}")
    return AddSymbol(
        lib=_string(bound["symbol_lib"], line),
        name=_string(bound["symbol_name"], line),
        x=_coord_expr(bound["pos_x"], anchors, line),
        y=_coord_expr(bound["pos_y"], anchors, line),
        reference=_string(bound["reference"], line),
        value=_string(bound["value"], line),
        rotation=rotation,
        mirror=_MIRRORS[mirror_text],
    )


def _parse_add_label(call: ast.Call,
                     anchors: Dict[int, Tuple[float, float]]) -> AddLabel:
    line = call.lineno
    names = ("label_pos", "label_text", "label_ref", "label_type",
             "text_orient")
    required = ("label_pos", "label_text", "label_ref", "label_type")
    bound = _bind(call, names, required, line)
    label_type = _string(bound["label_type"], line)
    if label_type not in _LABEL_TYPES:
        raise ProgramSyntaxError(line, f"invalid label_type {label_type!r}")
    orient = int(_number(bound["text_orient"], line)) \
        if "text_orient" in bound else 0
    if orient not in _ROTATIONS:
        raise ProgramSyntaxError(line, f"invalid text_orient {orient}")
    return AddLabel(
        pos=_label_pos(bound["label_pos"], anchors, line),
        text=_string(bound["label_text"], line),
        reference=_string(bound["label_ref"], line),
        label_type=label_type,
        orient=orient,
    )


def _label_pos(node: ast.expr, anchors: Dict[int, Tuple[float, float]],
               line: int) -> Union[Tuple[CoordExpr, CoordExpr], PinAnchor]:
    if isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name)
                and node.func.id == "get_pin_location"):
            raise ProgramSyntaxError(
                line, "label_pos call must be get_pin_location(ref, pin)")
        bound = _bind(node, ("reference", "pin"), ("reference", "pin"), line)
        return PinAnchor(_string(bound["reference"], line),
                         _string(bound["pin"], line))
    if isinstance(node, ast.List) and len(node.elts) == 2:
        return (_coord_expr(node.elts[0], anchors, line),
                _coord_expr(node.elts[1], anchors, line))
    raise ProgramSyntaxError(
        line, "label_pos must be [x, y] or get_pin_location(ref, pin)")


def _parse_connect(call: ast.Call) -> ConnectPins:
    line = call.lineno
    names = ("ref_a", "pin_a", "ref_b", "pin_b")
    bound = _bind(call, names, names, line)
    return ConnectPins(*(_string(bound[n], line) for n in names))


def _parse_add_wire(call: ast.Call) -> AddNewWire:
    line = call.lineno
    names = ("start", "end")
    bound = _bind(call, names, names, line)
    return AddNewWire(_point_literal(bound["start"], line),
                      _point_literal(bound["end"], line))


def _point_literal(node: ast.expr, line: int) -> Point:
    if not (isinstance(node, ast.List) and len(node.elts) == 2):
        raise ProgramSyntaxError(line, "wire endpoints must be [x, y] lists")
    return Point(_number(node.elts[0], line), _number(node.elts[1], line))


def _coord_expr(node: ast.expr, anchors: Dict[int, Tuple[float, float]],
                line: int) -> CoordExpr:
    if isinstance(node, (ast.Constant, ast.UnaryOp)):
        return Literal(_number(node, line))
    if isinstance(node, ast.Name):
        index, axis = _anchor_name(node.id, anchors, line)
        return AnchorRef(index, axis, None)
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub)):
        if not isinstance(node.left, ast.Name):
            raise ProgramSyntaxError(
                line, "coordinate arithmetic must be anchor +/- offset")
        index, axis = _anchor_name(node.left.id, anchors, line)
        offset = _number(node.right, line)
        if isinstance(node.op, ast.Sub):
            offset = -offset
        return AnchorRef(index, axis, offset)
    raise ProgramSyntaxError(line,
                             f"invalid coordinate {ast.unparse(node)!r}")


def _anchor_name(name: str, anchors: Dict[int, Tuple[float, float]],
                 line: int) -> Tuple[int, str]:
    match = _ANCHOR_X_RE.match(name)
    axis = "x"
    if not match:
        match = _ANCHOR_Y_RE.match(name)
        axis = "y"
    if not match:
        raise ProgramSyntaxError(line, f"unknown name {name!r}")
    index = int(match.group(1))
    if index not in anchors:
        raise ProgramSyntaxError(line, f"anchor {index} used before definition")
    return index, axis


def _number(node: ast.expr, line: int) -> float:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_number(node.operand, line)
    if isinstance(node, ast.Constant) \
            and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    raise ProgramSyntaxError(line, "expected a numeric literal")


def _string(node: ast.expr, line: int) -> str:
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return node.value
    raise ProgramSyntaxError(line, "expected a string literal")


# ---------------------------------------------------------------------------
# Execution


@dataclass
class _PendingPair:
    a: Point
    b: Point
    line: int


class _Interp:
    def __init__(self, library: SymbolLibrary):
        self.library = library
        self.anchors: Dict[int, Tuple[float, float]] = {}
        self.symbols: Dict[str, SymbolInstance] = {}
        self.defs: Dict[str, SymbolDef] = {}
        self.labels: List[LabelInstance] = []
        self.wires: List[WireSegment] = []
        self.pending: List[_PendingPair] = []
        self.saw_write_out = False
        self.diagnostics = Diagnostics()
        self._dsu: Dict[Tuple[int, int], Tuple[int, int]] = {}
        self._occupied: set = set()
        self.current_index = -1

    # -- error plumbing ----------------------------------------------------

    def fail(self, code: str, message: str, line: int = 0) -> None:
        self.diagnostics.errors.append(
            ExecError(code, message, line, self.current_index))
        raise _Abort()

    def warn(self, code: str, message: str, line: int = 0) -> None:
        self.diagnostics.warnings.append(
            ExecError(code, message, line, self.current_index))

    def resolve_coord(self, coord: CoordExpr, line: int) -> float:
        if isinstance(coord, Literal):
            return coord.value
        anchor = self.anchors.get(coord.index)
        if anchor is None:
            self.fail("UnknownReference",
                      f"anchor {coord.index} is not defined", line)
        value = anchor[0] if coord.axis == "x" else anchor[1]
        if coord.offset is not None:
            value += coord.offset
        return value

    def check_range(self, x: float, y: float, line: int) -> None:
        if not (COORD_MIN <= x <= COORD_MAX and COORD_MIN <= y <= COORD_MAX):
            self.fail("OutOfRangeCoordinate",
                      f"position ({x:g}, {y:g}) outside "
                      f"[{COORD_MIN:g}, {COORD_MAX:g}] mm", line)

    def add_symbol(self, command: AddSymbol, line: int = 0) -> None:
        lib_id = f"{command.lib}:{command.name}"
        if lib_id not in self.library:
            self.fail("UnknownSymbol", f"symbol {lib_id!r} not in library",
                      line)
        if command.reference in self.symbols:
            self.fail("DuplicateReference",
                      f"reference {command.reference!r} already placed", line)
        raw_x = self.resolve_coord(command.x, line)
        raw_y = self.resolve_coord(command.y, line)
        self.check_range(raw_x, raw_y, line)
        position = snap_point(Point(raw_x, raw_y))
        inst = SymbolInstance(lib_id=lib_id, reference=command.reference,
                              value=command.value, position=position,
                              rotation=command.rotation, mirror=command.mirror)
        self.symbols[command.reference] = inst
        self.defs[command.reference] = self.library.get(lib_id)

    def add_label(self, command: AddLabel, line: int = 0) -> None:
        if isinstance(command.pos, PinAnchor):
            position = self.label_position_at_pin(command.pos, line)
        else:
            raw = Point(self.resolve_coord(command.pos[0], line),
                        self.resolve_coord(command.pos[1], line))
            self.check_range(raw.x, raw.y, line)
            position = snap_point(raw)
        label = LabelInstance(text=command.text, position=position,
                              orientation=command.orient,
                              label_type=command.label_type,
                              reference=command.reference)
        self.labels.append(label)

    def label_position_at_pin(self, pin_anchor: PinAnchor,
                              line: int) -> Point:
        location, inst, pin = self.pin_location(pin_anchor.reference,
                                                pin_anchor.pin, line)
        direction = _outward_direction(inst, pin)
        raw = Point(location.x + direction[0] * LABEL_STUB,
                    location.y + direction[1] * LABEL_STUB)
        self.check_range(raw.x, raw.y, line)
        return snap_point(raw)

    def pin_location(self, reference: str, token: str, line: int
                     ) -> Tuple[Point, SymbolInstance, PinDef]:
        inst = self.symbols.get(reference)
        if inst is None:
            self.fail("UnknownReference",
                      f"reference {reference!r} is not placed", line)
        definition = self.defs[reference]
        pin: Optional[PinDef] = None
        if inst.kind == "power" and token == inst.value:
            pin = definition.pins[0] if definition.pins else None
        if pin is None:
            try:
                pin = resolve_pin(definition, token)
            except _errors.NoSuchPin:
                self.fail("UnknownPin",
                          f"{reference!r} has no pin matching {token!r}", line)
            except _errors.AmbiguousPinName:
                self.fail("UnknownPin",
                          f"pin name {token!r} is ambiguous on {reference!r}",
                          line)
        return pin_world_location(inst, pin), inst, pin

    def endpoint_location(self, reference: str, token: str,
                          line: int) -> Point:
        if reference in self.symbols:
            return self.pin_location(reference, token, line)[0]
        for label in self.labels:
            if label.reference == reference:
                if token != "1":
                    self.fail("UnknownPin",
                              f"label {reference!r} has no pin {token!r}",
                              line)
                return label.position
        self.fail("UnknownReference",
                  f"reference {reference!r} is not placed", line)

    def connect_pins(self, command: ConnectPins, line: int = 0) -> None:
        a = self.endpoint_location(command.ref_a, command.pin_a, line)
        b = self.endpoint_location(command.ref_b, command.pin_b, line)
        self.pending.append(_PendingPair(a, b, line))

    def add_new_wire(self, command: AddNewWire, line: int = 0) -> None:
        self.check_range(command.a.x, command.a.y, line)
        self.check_range(command.b.x, command.b.y, line)
        a = snap_point(command.a)
        b = snap_point(command.b)
        if quantize(a) == quantize(b):
            self.fail("ZeroLengthWire",
                      f"wire from ({command.a.x:g}, {command.a.y:g}) to "
                      f"({command.b.x:g}, {command.b.y:g}) has zero length",
                      line)
        segment = WireSegment(a, b)
        if not self._is_duplicate(segment):
            self.wires.append(segment)
        else:
            self.warn("DuplicateWire",
                      f"dropping duplicate wire ({a.x:g}, {a.y:g}) -- "
                      f"({b.x:g}, {b.y:g})", line)

    def _is_duplicate(self, segment: WireSegment) -> bool:
        key = frozenset((quantize(segment.a), quantize(segment.b)))
        return any(frozenset((quantize(w.a), quantize(w.b))) == key
                   for w in self.wires)

    # -- routing -------------------------------------------------------------

    def _find(self, key: Tuple[int, int]) -> Tuple[int, int]:
        root = key
        while self._dsu.get(root, root) != root:
            root = self._dsu[root]
        while self._dsu.get(key, key) != key:
            self._dsu[key], key = root, self._dsu[key]
        return root

    def _union(self, a: Tuple[int, int], b: Tuple[int, int]) -> None:
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            self._dsu[max(ra, rb)] = min(ra, rb)

    def write_out(self) -> None:
        self.saw_write_out = True
        self._register_points()
        for pair in self.pending:
            self._union(quantize(pair.a), quantize(pair.b))
        for wire in self.wires:
            self._union(quantize(wire.a), quantize(wire.b))
        for pair in self.pending:
            self.route_pair(pair)
        self.pending = []

    def _register_points(self) -> None:
        """Seed the intended-net structure: every electrical point in the
        design plus name merges, so routing can detect foreign contacts."""
        for reference, inst in self.symbols.items():
            definition = self.defs[reference]
            for pin in definition.pins:
                self._occupied.add(quantize(pin_world_location(inst, pin)))
        for label in self.labels:
            self._occupied.add(quantize(label.position))
        for wire in self.wires:
            self._occupied.add(quantize(wire.a))
            self._occupied.add(quantize(wire.b))
        for pair in self.pending:
            self._occupied.add(quantize(pair.a))
            self._occupied.add(quantize(pair.b))

        by_label_text: Dict[str, Tuple[int, int]] = {}
        for label in self.labels:
            key = quantize(label.position)
            first = by_label_text.setdefault(label.text, key)
            self._union(first, key)
        by_power_name: Dict[str, Tuple[int, int]] = {}
        for reference, inst in self.symbols.items():
            if inst.kind != "power":
                continue
            definition = self.defs[reference]
            for pin in definition.pins:
                key = quantize(pin_world_location(inst, pin))
                first = by_power_name.setdefault(inst.value, key)
                self._union(first, key)

    def route_pair(self, pair: _PendingPair) -> None:
        a, b = pair.a, pair.b
        if quantize(a) == quantize(b):
            return
        net = self._find(quantize(a))
        primary = self._route_segments(a, b, Point(b.x, a.y))
        if not self._conflicts(primary, net):
            self._install(primary)
            return
        fallback = self._route_segments(a, b, Point(a.x, b.y))
        if not self._conflicts(fallback, net):
            self._install(fallback)
            return
        self._install(primary)

    def _route_segments(self, a: Point, b: Point,
                        elbow: Point) -> List[WireSegment]:
        if quantize(a) == quantize(elbow) or quantize(b) == quantize(elbow):
            return [WireSegment(a, b)]
        return [WireSegment(a, elbow), WireSegment(elbow, b)]

    def _conflicts(self, segments: List[WireSegment], net: Tuple[int, int]
                   ) -> bool:
        for segment in segments:
            for endpoint in (segment.a, segment.b):
                key = quantize(endpoint)
                if key in self._occupied and self._find(key) != net:
                    return True  # endpoint would fuse with a foreign point
            for existing in self.wires:
                other_net = self._find(quantize(existing.a))
                if other_net == net:
                    continue
                if collinear_overlap_length(segment.a, segment.b,
                                            existing.a, existing.b) > 1e-9:
                    return True
                for endpoint in (existing.a, existing.b):
                    if point_inside_segment(endpoint, segment.a, segment.b):
                        return True
                for endpoint in (segment.a, segment.b):
                    if point_inside_segment(endpoint, existing.a, existing.b):
                        return True
        return False

    def _install(self, segments: List[WireSegment]) -> None:
        for segment in segments:
            if quantize(segment.a) == quantize(segment.b):
                continue
            self._union(quantize(segment.a), quantize(segment.b))
            self._occupied.add(quantize(segment.a))
            self._occupied.add(quantize(segment.b))
            if not self._is_duplicate(segment):
                self.wires.append(segment)

    # -- assembly ------------------------------------------------------------

    def build_schematic(self) -> Schematic:
        junctions = derive_junctions(self.wires)
        embedded = {}
        for reference, definition in self.defs.items():
            embedded[definition.lib_id] = definition
        return Schematic(
            symbols=list(self.symbols.values()),
            labels=list(self.labels),
            wires=list(self.wires),
            junctions=junctions,
            embedded_lib=embedded,
            version=DEFAULT_VERSION,
        )


def derive_junctions(wires: Sequence[WireSegment]) -> List[Junction]:
    """Junction wherever an endpoint touches another wire's interior, or
    three or more wire endpoints coincide."""
    points: Dict[Tuple[int, int], Point] = {}
    counts: Dict[Tuple[int, int], int] = {}
    for wire in wires:
        for endpoint in (wire.a, wire.b):
            key = quantize(endpoint)
            points.setdefault(key, endpoint)
            counts[key] = counts.get(key, 0) + 1

    junction_keys = set()
    for key, count in counts.items():
        if count >= 3:
            junction_keys.add(key)
    for key, point in points.items():
        if key in junction_keys:
            continue
        for wire in wires:
            if point_inside_segment(point, wire.a, wire.b):
                junction_keys.add(key)
                break
    ordered = sorted(junction_keys)
    return [Junction(points[key]) for key in ordered]


def _outward_direction(inst: SymbolInstance,
                       pin: PinDef) -> Tuple[float, float]:
    from .geometry import transform_offset

    dx, dy = pin.local_offset
    if abs(dx) > 1e-9 or abs(dy) > 1e-9:
        if abs(dx) >= abs(dy):
            local = (1.0 if dx > 0 else -1.0, 0.0)
        else:
            local = (0.0, 1.0 if dy > 0 else -1.0)
    else:
        local = _ORIENTATION_VECTORS.get(pin.orientation, (1.0, 0.0))
    return transform_offset(local[0], local[1], inst.rotation, inst.mirror)


_ORIENTATION_VECTORS = {
    0: (1.0, 0.0),      # pin points +x; stub continues outward
    90: (0.0, 1.0),
    180: (-1.0, 0.0),
    270: (0.0, -1.0),
}


def run_program(text_or_program: Union[str, Program],
                library: SymbolLibrary
                ) -> Tuple[Optional[Schematic], Diagnostics]:
    """Interpret a program; returns (schematic or None, diagnostics)."""
    if isinstance(text_or_program, Program):
        program = text_or_program
    else:
        program = parse_program(text_or_program)
    interp = _Interp(library)
    schematic = None
    try:
        for i, command in enumerate(program.commands):
            line = program.lines[i] if program.lines else i + 1
            interp.current_index = i
            if isinstance(command, SetAnchor):
                interp.anchors[command.index] = (command.x, command.y)
            elif isinstance(command, AddSymbol):
                interp.add_symbol(command, line)
            elif isinstance(command, AddLabel):
                interp.add_label(command, line)
            elif isinstance(command, ConnectPins):
                interp.connect_pins(command, line)
            elif isinstance(command, AddNewWire):
                interp.add_new_wire(command, line)
            elif isinstance(command, WriteOutAllWires):
                interp.write_out()
        if not interp.saw_write_out:
            interp.fail("MissingWriteOut",
                        "program never calls write_out_all_wires()")
        schematic = interp.build_schematic()
    except _Abort:
        schematic = None
    return schematic, interp.diagnostics
