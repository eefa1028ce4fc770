"""Schematic-to-code converter: emit Code-L1/L2/L3 programs.

L1 places members with integer-millimeter offsets from rounded cluster
anchors and wires by pin name; L2 uses literal coordinates with pin-name
wiring; L3 uses literal coordinates and re-emits the source wire
segments verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .geometry import Point
from .model import LabelInstance, Schematic, SymbolInstance
from .netgraph import ConnectivityGraph, NetVertex

PREAMBLE = """\
# Auto-generated schematic symbols
import sys
import os

# Get project path and import kicad schematic interface
PROJECT_PATH = os.environ['PROJECT_PATH']
sys.path.append(PROJECT_PATH)
from modules.kicad_sch_interface import *
"""


@dataclass(frozen=True)
class Literal:
    value: float


@dataclass(frozen=True)
class AnchorRef:
    index: int
    axis: str  # "x" | "y"
    offset: Optional[float] = None  # None renders as the bare anchor name


CoordExpr = Union[Literal, AnchorRef]


@dataclass(frozen=True)
class PinAnchor:
    reference: str
    pin: str


@dataclass(frozen=True)
class SetAnchor:
    index: int
    x: float
    y: float


@dataclass(frozen=True)
class AddSymbol:
    lib: str
    name: str
    x: CoordExpr
    y: CoordExpr
    reference: str
    value: str
    rotation: int
    mirror: str  # "none" | "x" | "y"


@dataclass(frozen=True)
class AddLabel:
    pos: Union[Tuple[CoordExpr, CoordExpr], PinAnchor]
    text: str
    reference: str
    label_type: str
    orient: int


@dataclass(frozen=True)
class ConnectPins:
    ref_a: str
    pin_a: str
    ref_b: str
    pin_b: str
    comment: str = field(default="", compare=False)


@dataclass(frozen=True)
class AddNewWire:
    a: Point
    b: Point


@dataclass(frozen=True)
class WriteOutAllWires:
    pass


Command = Union[SetAnchor, AddSymbol, AddLabel, ConnectPins, AddNewWire,
                WriteOutAllWires]


@dataclass
class Program:
    commands: List[Command]
    level: str  # "L1" | "L2" | "L3"
    # Source line of each command when parsed from text (compare-exempt so
    # emitted and reparsed programs compare equal).
    lines: Optional[List[int]] = field(default=None, compare=False)


@dataclass
class Cluster:
    symbols: List[SymbolInstance]
    center: SymbolInstance
    component_roots: List[int]


def select_clusters(sch: Schematic, graph: ConnectivityGraph
                    ) -> List[Cluster]:
    """Wire-level connected components projected onto symbols.

    `graph` must be built with include_name_edges=False so that label and
    power-name merges do not fuse visually separate clusters. Symbols
    sharing any wire-level net form one cluster. The center is the
    component symbol with the most pins (ties by lexicographic
    reference); clusters are ordered leftmost then topmost by center.
    """
    net_refs: Dict[int, List[str]] = {}
    pin_counts: Dict[str, int] = {}
    for i, vertex in enumerate(graph.vertices):
        if vertex.kind in ("pin", "power"):
            net_refs.setdefault(graph.find(i), []).append(vertex.reference)
            pin_counts[vertex.reference] = pin_counts.get(vertex.reference, 0) + 1

    parent = {inst.reference: inst.reference for inst in sch.symbols}

    def find(ref: str) -> str:
        while parent[ref] != ref:
            parent[ref] = parent[parent[ref]]
            ref = parent[ref]
        return ref

    for refs in net_refs.values():
        first = find(refs[0])
        for other in refs[1:]:
            root = find(other)
            if root != first:
                parent[max(root, first)] = min(root, first)
                first = min(root, first)

    groups: Dict[str, List[SymbolInstance]] = {}
    for inst in sch.symbols:
        groups.setdefault(find(inst.reference), []).append(inst)

    clusters = []
    for members in groups.values():
        clusters.append(Cluster(symbols=members,
                                center=_cluster_center(members, pin_counts),
                                component_roots=[]))
    clusters.sort(key=lambda c: (c.center.position.x, c.center.position.y,
                                 c.center.reference))
    ref_cluster = {m.reference: i
                   for i, cluster in enumerate(clusters)
                   for m in cluster.symbols}
    for root, refs in net_refs.items():
        clusters[ref_cluster[refs[0]]].component_roots.append(root)
    return clusters


def _cluster_center(members: Sequence[SymbolInstance],
                    pin_counts: Dict[str, int]) -> SymbolInstance:
    components = [m for m in members if m.kind == "component"]
    candidates = components if components else list(members)
    return min(candidates,
               key=lambda m: (-pin_counts.get(m.reference, 0), m.reference))


def emit_program(sch: Schematic, graph: ConnectivityGraph, level: str
                 ) -> Program:
    """Emit a Program whose interpretation reproduces sch's netlist.

    `graph` is the wire-level graph (include_name_edges=False), shared
    with select_clusters.
    """
    if level not in ("L1", "L2", "L3"):
        raise ValueError(f"unknown level {level!r}")
    if getattr(graph, "includes_name_edges", False):
        raise ValueError(
            "emit_program needs the wire-level graph; rebuild it with "
            "include_name_edges=False")
    clusters = select_clusters(sch, graph)
    pins_by_ref = _pins_by_reference(graph)
    commands: List[Command] = []

    root_to_cluster: Dict[int, int] = {}
    for index, cluster in enumerate(clusters):
        for root in cluster.component_roots:
            root_to_cluster[root] = index

    label_cluster: Dict[str, int] = {}
    label_component: Dict[str, int] = {}
    for i, vertex in enumerate(graph.vertices):
        if vertex.kind == "label":
            root = graph.find(i)
            label_component[vertex.reference] = root
            label_cluster[vertex.reference] = root_to_cluster.get(root, 0)

    wire_cluster: List[int] = []
    wire_component: List[int] = []
    wire_vertex = [i for i, v in enumerate(graph.vertices)
                   if v.kind == "wire_end"]
    ends_iter = iter(wire_vertex)
    for wire in sch.wires:
        a = next(ends_iter)
        next(ends_iter)
        root = graph.find(a)
        wire_component.append(root)
        wire_cluster.append(root_to_cluster.get(root, 0))

    for index, cluster in enumerate(clusters, start=1):
        center = cluster.center
        anchor = _anchor_point(center.position, level)
        commands.append(SetAnchor(index, anchor[0], anchor[1]))
        commands.append(_symbol_command(center, index, anchor, level,
                                        is_center=True))
        members = [m for m in cluster.symbols if m is not center]
        members.sort(key=lambda m: (m.position.x, -m.position.y, m.reference))
        for member in members:
            commands.append(_symbol_command(member, index, anchor, level))

        labels = [l for l in sch.labels
                  if label_cluster.get(l.reference, 0) == index - 1]
        labels.sort(key=lambda l: (l.position.x, -l.position.y, l.reference))
        for label in labels:
            commands.append(_label_command(
                label, level, graph, label_component, pins_by_ref))

        if level == "L3":
            cluster_wires = [w for w, c in zip(sch.wires, wire_cluster)
                             if c == index - 1]
            cluster_wires.sort(key=lambda w: sorted([w.a, w.b]))
            for wire in cluster_wires:
                commands.append(AddNewWire(wire.a, wire.b))
        else:
            commands.extend(_connect_commands(
                sch, graph, index - 1, root_to_cluster, label_component))

    commands.append(WriteOutAllWires())
    return Program(commands=commands, level=level)


def _pins_by_reference(graph: ConnectivityGraph) -> Dict[str, List[NetVertex]]:
    pins: Dict[str, List[NetVertex]] = {}
    for vertex in graph.vertices:
        if vertex.kind in ("pin", "power"):
            pins.setdefault(vertex.reference, []).append(vertex)
    return pins


def _anchor_point(position: Point, level: str) -> Tuple[float, float]:
    if level == "L1":
        return (float(round(position.x)), float(round(position.y)))
    return (position.x, position.y)


def _coord(value: float, anchor: float, index: int, axis: str,
           level: str) -> CoordExpr:
    if level == "L1":
        offset = float(round(value - anchor))
        return AnchorRef(index, axis, offset)
    return Literal(value)


def _symbol_command(inst: SymbolInstance, index: int,
                    anchor: Tuple[float, float], level: str,
                    is_center: bool = False) -> AddSymbol:
    lib, _, name = inst.lib_id.partition(":")
    if is_center:
        x: CoordExpr = AnchorRef(index, "x", None)
        y: CoordExpr = AnchorRef(index, "y", None)
    else:
        x = _coord(inst.position.x, anchor[0], index, "x", level)
        y = _coord(inst.position.y, anchor[1], index, "y", level)
    return AddSymbol(lib=lib, name=name, x=x, y=y,
                     reference=inst.reference, value=inst.value,
                     rotation=inst.rotation, mirror=inst.mirror)


def _label_command(label: LabelInstance, level: str,
                   graph: ConnectivityGraph,
                   label_component: Dict[str, int],
                   pins_by_ref: Dict[str, List[NetVertex]]) -> AddLabel:
    pos: Union[Tuple[CoordExpr, CoordExpr], PinAnchor]
    if level == "L1":
        nearest = _nearest_pin(label, graph, label_component)
        if nearest is not None:
            token = _pin_token(nearest)
            pos = PinAnchor(nearest.reference, token)
        else:
            pos = (Literal(label.position.x), Literal(label.position.y))
    else:
        pos = (Literal(label.position.x), Literal(label.position.y))
    return AddLabel(pos=pos, text=label.text, reference=label.reference,
                    label_type=label.label_type, orient=label.orientation)


def _nearest_pin(label: LabelInstance, graph: ConnectivityGraph,
                 label_component: Dict[str, int]) -> Optional[NetVertex]:
    root = label_component.get(label.reference)
    best = None
    best_key = None
    for i, vertex in enumerate(graph.vertices):
        if vertex.kind not in ("pin", "power"):
            continue
        if graph.find(i) != root:
            continue
        distance = math.hypot(vertex.point.x - label.position.x,
                              vertex.point.y - label.position.y)
        key = (distance, vertex.reference, vertex.pin_id)
        if best_key is None or key < best_key:
            best, best_key = vertex, key
    return best


@dataclass(frozen=True)
class _Participant:
    reference: str
    token: str
    pin_id: str
    display_name: str
    kind: str  # "pin" | "power" | "label"

    def key(self) -> Tuple[str, str]:
        return (self.reference, self.token)


def _pin_token(vertex: NetVertex) -> str:
    if vertex.kind == "power":
        return vertex.text
    if vertex.pin_name not in ("", "~"):
        return vertex.pin_name
    return vertex.pin_id


def _participant(vertex: NetVertex) -> _Participant:
    if vertex.kind == "power":
        return _Participant(vertex.reference, vertex.text, vertex.pin_id,
                            vertex.text, "power")
    name = vertex.pin_name if vertex.pin_name not in ("", "~") else "None"
    return _Participant(vertex.reference, _pin_token(vertex), vertex.pin_id,
                        name, "pin")


def _connect_commands(sch: Schematic, graph: ConnectivityGraph,
                      cluster_index: int,
                      root_to_cluster: Dict[int, int],
                      label_component: Dict[str, int]) -> List[ConnectPins]:
    by_root: Dict[int, dict] = {}
    for i, vertex in enumerate(graph.vertices):
        root = graph.find(i)
        if root_to_cluster.get(root) != cluster_index:
            continue
        entry = by_root.setdefault(root, {"pins": [], "power": [],
                                          "labels": []})
        if vertex.kind == "pin":
            entry["pins"].append(_participant(vertex))
        elif vertex.kind == "power":
            entry["power"].append(_participant(vertex))
        elif vertex.kind == "label":
            entry["labels"].append(_Participant(
                vertex.reference, "1", "1", vertex.text, "label"))

    commands: List[ConnectPins] = []
    for root in sorted(by_root):
        entry = by_root[root]
        pins = sorted(set(entry["pins"]), key=_Participant.key)
        power = sorted(set(entry["power"]), key=_Participant.key)
        labels = sorted(set(entry["labels"]), key=_Participant.key)
        if len(pins) + len(power) + len(labels) < 2:
            continue
        anchor = pins[0] if pins else (power[0] if power else labels[0])
        for flag in power:
            if flag is not anchor:
                commands.append(_connect(flag, anchor))
        nearest_for = {l.reference: l for l in labels}
        for label in labels:
            if label is anchor:
                continue
            target = _label_target(label, graph, label_component, pins, anchor)
            commands.append(_connect(label, target))
        for node in pins[1:]:
            commands.append(_connect(anchor, node))
    return commands


def _label_target(label: _Participant, graph: ConnectivityGraph,
                  label_component: Dict[str, int],
                  pins: List[_Participant], anchor: _Participant
                  ) -> _Participant:
    root = label_component.get(label.reference)
    label_vertex = None
    for vertex in graph.vertices:
        if vertex.kind == "label" and vertex.reference == label.reference:
            label_vertex = vertex
            break
    if label_vertex is None or not pins:
        return anchor
    best, best_key = anchor, None
    for candidate in pins:
        for vertex in graph.vertices:
            if vertex.kind == "pin" and vertex.reference == candidate.reference \
                    and vertex.pin_id == candidate.pin_id:
                distance = math.hypot(
                    vertex.point.x - label_vertex.point.x,
                    vertex.point.y - label_vertex.point.y)
                key = (distance, candidate.key())
                if best_key is None or key < best_key:
                    best, best_key = candidate, key
    return best


def _connect(a: _Participant, b: _Participant) -> ConnectPins:
    comment = (f"# Connecting {a.reference} pin {a.token} "
               f"(Pin ID {a.pin_id} -- Name {a.display_name}) "
               f"to {b.reference} pin {b.token} "
               f"(Pin ID {b.pin_id} -- Name {b.display_name})")
    return ConnectPins(a.reference, a.token, b.reference, b.token,
                       comment=comment)


def render_program(program: Program) -> str:
    """Render in the program surface syntax; parse_program inverts it."""
    lines: List[str] = [PREAMBLE]
    commands = list(program.commands)
    groups = _group_by_cluster(commands)

    for group in groups:
        if group["anchor"] is None:
            _render_wiring(lines, group, program.level)
            continue
        anchor: SetAnchor = group["anchor"]
        center: Optional[AddSymbol] = group["symbols"][0] \
            if group["symbols"] else None
        center_name = f"{center.lib}:{center.name}" if center else ""
        lines.append(f"### Placing center symbol {anchor.index} : "
                     f"{center_name}###")
        lines.append("")
        lines.append(f"center_x_{anchor.index}, center_y_{anchor.index} = "
                     f"{_anchor_value(anchor.x, program.level)}, "
                     f"{_anchor_value(anchor.y, program.level)}")
        lines.append("")
        if center is not None:
            lines.append(_render_command(center))
            lines.append("")
        lines.append(f"### Placing other symbols in the Schematic with "
                     f"respect to the center symbol {anchor.index}###")
        lines.append("")
        for command in group["symbols"][1:]:
            lines.append(_render_command(command))
        if group["symbols"][1:]:
            lines.append("")
        lines.append("### Placing all global labels in the Schematic and "
                     "connect them to the neighbor pin ###")
        lines.append("")
        for command in group["labels"]:
            lines.append(_render_command(command))
        if group["labels"]:
            lines.append("")
        _render_wiring(lines, group, program.level)

    lines.append("write_out_all_wires()")
    text = "\n".join(lines)
    return text if text.endswith("\n") else text + "\n"


def _render_wiring(lines: List[str], group: dict, level: str) -> None:
    verb = "Adding" if level == "L3" else "Connecting"
    lines.append(f"### {verb} all wires in the Schematic ###")
    lines.append("")
    for command in group["wiring"]:
        if isinstance(command, ConnectPins) and command.comment:
            lines.append(command.comment)
            lines.append(_render_command(command))
            lines.append("")
        else:
            lines.append(_render_command(command))
    if group["wiring"] and not isinstance(group["wiring"][-1], ConnectPins):
        lines.append("")


def _group_by_cluster(commands: Sequence[Command]) -> List[dict]:
    groups: List[dict] = []
    current: Optional[dict] = None
    for command in commands:
        if isinstance(command, WriteOutAllWires):
            continue
        if isinstance(command, SetAnchor):
            current = {"anchor": command, "symbols": [], "labels": [],
                       "wiring": []}
            groups.append(current)
            continue
        if current is None:
            current = {"anchor": None, "symbols": [], "labels": [],
                       "wiring": []}
            groups.append(current)
        if isinstance(command, AddSymbol):
            current["symbols"].append(command)
        elif isinstance(command, AddLabel):
            current["labels"].append(command)
        else:
            current["wiring"].append(command)
    return groups


def _anchor_value(value: float, level: str) -> str:
    if level == "L1" and float(value).is_integer():
        return str(int(value))
    return f"{value:.3f}"


def _format_value(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return f"{value:g}"


def _render_coord(coord: CoordExpr) -> str:
    if isinstance(coord, Literal):
        return _format_value(coord.value)
    name = f"center_{coord.axis}_{coord.index}"
    if coord.offset is None:
        return name
    return f"{name} + ({_format_value(coord.offset)})"


def _render_command(command: Command) -> str:
    if isinstance(command, AddSymbol):
        mirror = "None" if command.mirror == "none" else command.mirror
        return (f'add_schematic_symbol(symbol_lib="{command.lib}", '
                f'symbol_name="{command.name}", '
                f'pos_x={_render_coord(command.x)}, '
                f'pos_y={_render_coord(command.y)}, '
                f'reference="{command.reference}", '
                f'value="{command.value}", '
                f'rotation={command.rotation}, mirror="{mirror}")')
    if isinstance(command, AddLabel):
        if isinstance(command.pos, PinAnchor):
            pos = (f'get_pin_location("{command.pos.reference}", '
                   f'"{command.pos.pin}")')
        else:
            pos = (f"[{_render_coord(command.pos[0])}, "
                   f"{_render_coord(command.pos[1])}]")
        return (f'add_label(label_pos={pos}, label_text="{command.text}", '
                f'label_ref="{command.reference}", '
                f'label_type="{command.label_type}", '
                f'text_orient={command.orient})')
    if isinstance(command, ConnectPins):
        return (f'connect_pins("{command.ref_a}", "{command.pin_a}", '
                f'"{command.ref_b}", "{command.pin_b}")')
    if isinstance(command, AddNewWire):
        return (f"add_new_wire([{_format_value(command.a.x)}, "
                f"{_format_value(command.a.y)}], "
                f"[{_format_value(command.b.x)}, "
                f"{_format_value(command.b.y)}])")
    if isinstance(command, WriteOutAllWires):
        return "write_out_all_wires()"
    raise TypeError(f"cannot render {type(command).__name__}")
