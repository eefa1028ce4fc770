"""Typed schematic document bridging to s-expression trees.

Covers the three item types of the schematic data model (component and
power symbols, net labels) plus wires and junctions, with readers and
writers for the KiCad v7 structural subset and bounding boxes for all
items. Unrecognized nodes are carried through verbatim.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import sexpr, symbols
from .errors import DuplicateReference, NotASchematic, UnresolvedLibId
from .geometry import Point, Rect, transform_offset
from .symbols import SymbolDef, SymbolLibrary

DEFAULT_VERSION = "20230121"
LABEL_CHAR_WIDTH = 1.27
LABEL_HEIGHT = 1.778

_UUID_NS = uuid.UUID("d5f7a6d2-63a1-4b02-8f23-176f54d8a9c0")

ROTATIONS = (0, 90, 180, 270)
MIRRORS = ("none", "x", "y")
LABEL_TYPES = ("local", "global_input", "global_output",
               "global_bidirectional", "global_passive")

_SHAPE_TO_TYPE = {
    "input": "global_input",
    "output": "global_output",
    "bidirectional": "global_bidirectional",
    "passive": "global_passive",
}
_TYPE_TO_SHAPE = {v: k for k, v in _SHAPE_TO_TYPE.items()}


@dataclass(frozen=True)
class SymbolInstance:
    lib_id: str
    reference: str
    value: str
    position: Point
    rotation: int = 0
    mirror: str = "none"

    @property
    def kind(self) -> str:
        library = self.lib_id.split(":", 1)[0]
        if library == "power" or self.reference.startswith("#PWR"):
            return "power"
        return "component"


@dataclass(frozen=True)
class LabelInstance:
    text: str
    position: Point
    orientation: int
    label_type: str
    reference: str

    def item_key(self) -> tuple:
        """Identity for round-trip comparison; the reference is session-local
        (the KiCad format has no label-reference field)."""
        return ("label", self.text, self.position, self.orientation,
                self.label_type)


@dataclass(frozen=True)
class WireSegment:
    a: Point
    b: Point


@dataclass(frozen=True)
class Junction:
    position: Point


@dataclass
class Schematic:
    symbols: List[SymbolInstance] = field(default_factory=list)
    labels: List[LabelInstance] = field(default_factory=list)
    wires: List[WireSegment] = field(default_factory=list)
    junctions: List[Junction] = field(default_factory=list)
    embedded_lib: Dict[str, SymbolDef] = field(default_factory=dict)
    extras: List[sexpr.SList] = field(default_factory=list)
    version: str = DEFAULT_VERSION

    def symbol_by_reference(self, reference: str) -> Optional[SymbolInstance]:
        for inst in self.symbols:
            if inst.reference == reference:
                return inst
        return None

    def library(self, external: Optional[SymbolLibrary] = None) -> SymbolLibrary:
        """Embedded definitions merged under any external library."""
        merged = SymbolLibrary(dict(self.embedded_lib))
        if external is not None:
            merged = external.merged_with(merged)
        return merged

    def item_sets(self) -> tuple:
        """Order-insensitive item identity, for round-trip checks."""
        return (
            frozenset((s.lib_id, s.reference, s.value, s.position,
                       s.rotation, s.mirror) for s in self.symbols),
            frozenset(l.item_key() for l in self.labels),
            frozenset(frozenset((w.a, w.b)) for w in self.wires),
            frozenset(j.position for j in self.junctions),
        )


def read_schematic(root: sexpr.SExprNode) -> Schematic:
    """Populate a Schematic from a parsed kicad_sch tree."""
    if not isinstance(root, sexpr.SList) or root.tag != "kicad_sch":
        raise NotASchematic("root tag is not kicad_sch")
    sch = Schematic()
    references = set()
    label_count = 0
    for node in root.children[1:]:
        if not isinstance(node, sexpr.SList):
            continue
        tag = node.tag
        if tag == "version":
            values = node.atoms()
            sch.version = str(values[0]) if values else DEFAULT_VERSION
        elif tag in ("generator", "generator_version", "uuid", "paper"):
            continue
        elif tag == "lib_symbols":
            for sym in node.find_all("symbol"):
                name = str(sym.children[1].value)
                sch.embedded_lib[name] = symbols.parse_symbol_def(sym, name)
        elif tag == "symbol":
            inst = _read_symbol_instance(node)
            if inst.reference in references:
                raise DuplicateReference(inst.reference)
            references.add(inst.reference)
            sch.symbols.append(inst)
        elif tag == "wire":
            wire = _read_wire(node)
            if wire is not None:
                sch.wires.append(wire)
        elif tag == "junction":
            at = node.find("at")
            values = at.atoms() if at else []
            if len(values) >= 2:
                sch.junctions.append(
                    Junction(Point(float(values[0]), float(values[1]))))
        elif tag in ("label", "global_label"):
            label_count += 1
            sch.labels.append(_read_label(node, tag, f"L{label_count}"))
        else:
            sch.extras.append(node)
    return sch


def write_schematic(sch: Schematic, version_header: str = "") -> sexpr.SList:
    """Emit the KiCad v7 structural subset; deterministic for equal inputs."""
    root = sexpr.SList([
        sexpr.Atom.symbol("kicad_sch"),
        sexpr.SList([sexpr.Atom.symbol("version"),
                     sexpr.Atom.symbol(version_header or sch.version)]),
        sexpr.SList([sexpr.Atom.symbol("generator"),
                     sexpr.Atom.string("schcode")]),
        sexpr.SList([sexpr.Atom.symbol("uuid"),
                     sexpr.Atom.string(_item_uuid("sheet", "root"))]),
        sexpr.SList([sexpr.Atom.symbol("paper"), sexpr.Atom.string("A4")]),
    ])

    lib_ids = sorted({inst.lib_id for inst in sch.symbols})
    lib_symbols = sexpr.SList([sexpr.Atom.symbol("lib_symbols")])
    for lib_id in lib_ids:
        if lib_id not in sch.embedded_lib:
            raise UnresolvedLibId(lib_id)
        definition = sch.embedded_lib[lib_id]
        lib_symbols.children.append(definition.source_with_lib_id())
    root.children.append(lib_symbols)

    for index, junction in enumerate(sch.junctions):
        root.children.append(_junction_node(junction, index))
    for index, wire in enumerate(sch.wires):
        root.children.append(_wire_node(wire, index))
    for index, label in enumerate(sch.labels):
        root.children.append(_label_node(label, index))
    for inst in sch.symbols:
        root.children.append(
            _symbol_node(inst, sch.embedded_lib[inst.lib_id]))
    root.children.extend(sch.extras)
    return root


def item_bbox(item, lib: SymbolLibrary) -> Rect:
    """Axis-aligned bounding box of a symbol, label, or wire."""
    if isinstance(item, SymbolInstance):
        definition = lib.get(item.lib_id)
        box = definition.body_bbox
        local_points = [
            (box.min_x, box.min_y), (box.min_x, box.max_y),
            (box.max_x, box.min_y), (box.max_x, box.max_y),
        ]
        local_points.extend(
            (pin.local_offset.x, pin.local_offset.y) for pin in definition.pins)
        world = []
        for x, y in local_points:
            offset = transform_offset(x, y, item.rotation, item.mirror)
            world.append((item.position.x + offset.x,
                          item.position.y + offset.y))
        return Rect.from_points(world)
    if isinstance(item, LabelInstance):
        return _label_bbox(item)
    if isinstance(item, WireSegment):
        return Rect.from_points([item.a, item.b])
    raise TypeError(f"no bbox for {type(item).__name__}")


def _label_bbox(label: LabelInstance) -> Rect:
    width = LABEL_CHAR_WIDTH * len(label.text)
    half = LABEL_HEIGHT / 2
    x, y = label.position
    if label.orientation == 0:  # text runs toward +x
        return Rect(x, y - half, x + width, y + half)
    if label.orientation == 90:  # toward -y (up the sheet)
        return Rect(x - half, y - width, x + half, y)
    if label.orientation == 180:
        return Rect(x - width, y - half, x, y + half)
    return Rect(x - half, y, x + half, y + width)


def _item_uuid(kind: str, key) -> str:
    return str(uuid.uuid5(_UUID_NS, f"{kind}:{key}"))


def _uuid_node(kind: str, key) -> sexpr.SList:
    return sexpr.SList([sexpr.Atom.symbol("uuid"),
                        sexpr.Atom.string(_item_uuid(kind, key))])


def _at_node(x: float, y: float, angle: Optional[int] = None) -> sexpr.SList:
    children = [sexpr.Atom.symbol("at"), sexpr.Atom.number(x),
                sexpr.Atom.number(y)]
    if angle is not None:
        children.append(sexpr.Atom.number(angle))
    return sexpr.SList(children)


def _effects_node() -> sexpr.SList:
    return sexpr.SList([
        sexpr.Atom.symbol("effects"),
        sexpr.SList([
            sexpr.Atom.symbol("font"),
            sexpr.SList([sexpr.Atom.symbol("size"),
                         sexpr.Atom.number(1.27), sexpr.Atom.number(1.27)]),
        ]),
    ])


def _property_node(name: str, value: str, x: float, y: float) -> sexpr.SList:
    return sexpr.SList([
        sexpr.Atom.symbol("property"),
        sexpr.Atom.string(name),
        sexpr.Atom.string(value),
        _at_node(x, y, 0),
        _effects_node(),
    ])


def _symbol_node(inst: SymbolInstance, definition: SymbolDef) -> sexpr.SList:
    node = sexpr.SList([
        sexpr.Atom.symbol("symbol"),
        sexpr.SList([sexpr.Atom.symbol("lib_id"),
                     sexpr.Atom.string(inst.lib_id)]),
        _at_node(inst.position.x, inst.position.y, inst.rotation),
    ])
    if inst.mirror != "none":
        node.children.append(
            sexpr.SList([sexpr.Atom.symbol("mirror"),
                         sexpr.Atom.symbol(inst.mirror)]))
    node.children.append(
        sexpr.SList([sexpr.Atom.symbol("unit"), sexpr.Atom.number(1)]))
    node.children.append(_uuid_node("symbol", inst.reference))
    node.children.append(_property_node(
        "Reference", inst.reference, inst.position.x, inst.position.y))
    node.children.append(_property_node(
        "Value", inst.value, inst.position.x, inst.position.y))
    for pin in definition.pins:
        node.children.append(sexpr.SList([
            sexpr.Atom.symbol("pin"),
            sexpr.Atom.string(pin.id),
            _uuid_node("pin", f"{inst.reference}:{pin.id}"),
        ]))
    return node


def _wire_node(wire: WireSegment, index: int) -> sexpr.SList:
    pts = sexpr.SList([
        sexpr.Atom.symbol("pts"),
        sexpr.SList([sexpr.Atom.symbol("xy"), sexpr.Atom.number(wire.a.x),
                     sexpr.Atom.number(wire.a.y)]),
        sexpr.SList([sexpr.Atom.symbol("xy"), sexpr.Atom.number(wire.b.x),
                     sexpr.Atom.number(wire.b.y)]),
    ])
    stroke = sexpr.SList([
        sexpr.Atom.symbol("stroke"),
        sexpr.SList([sexpr.Atom.symbol("width"), sexpr.Atom.number(0)]),
        sexpr.SList([sexpr.Atom.symbol("type"),
                     sexpr.Atom.symbol("default")]),
    ])
    return sexpr.SList([sexpr.Atom.symbol("wire"), pts, stroke,
                        _uuid_node("wire", index)])


def _junction_node(junction: Junction, index: int) -> sexpr.SList:
    return sexpr.SList([
        sexpr.Atom.symbol("junction"),
        _at_node(junction.position.x, junction.position.y),
        sexpr.SList([sexpr.Atom.symbol("diameter"), sexpr.Atom.number(0)]),
        sexpr.SList([sexpr.Atom.symbol("color"), sexpr.Atom.number(0),
                     sexpr.Atom.number(0), sexpr.Atom.number(0),
                     sexpr.Atom.number(0)]),
        _uuid_node("junction", index),
    ])


def _label_node(label: LabelInstance, index: int) -> sexpr.SList:
    if label.label_type == "local":
        node = sexpr.SList([sexpr.Atom.symbol("label"),
                            sexpr.Atom.string(label.text)])
    else:
        node = sexpr.SList([
            sexpr.Atom.symbol("global_label"),
            sexpr.Atom.string(label.text),
            sexpr.SList([sexpr.Atom.symbol("shape"),
                         sexpr.Atom.symbol(_TYPE_TO_SHAPE[label.label_type])]),
        ])
    node.children.append(
        _at_node(label.position.x, label.position.y, label.orientation))
    node.children.append(_effects_node())
    node.children.append(_uuid_node("label", index))
    return node


def _read_symbol_instance(node: sexpr.SList) -> SymbolInstance:
    lib_id_node = node.find("lib_id")
    if lib_id_node is None or not lib_id_node.atoms():
        raise NotASchematic("symbol node without lib_id")
    lib_id = str(lib_id_node.atoms()[0])
    at = node.find("at")
    if at is None:
        raise NotASchematic(f"symbol {lib_id} without position")
    values = at.atoms()
    x, y = float(values[0]), float(values[1])
    rotation = int(values[2]) if len(values) >= 3 else 0
    mirror_node = node.find("mirror")
    mirror = str(mirror_node.atoms()[0]) if mirror_node and mirror_node.atoms() \
        else "none"
    reference, value = "", ""
    for prop in node.find_all("property"):
        fields = prop.atoms()
        if len(fields) >= 2 and fields[0] == "Reference":
            reference = str(fields[1])
        elif len(fields) >= 2 and fields[0] == "Value":
            value = str(fields[1])
    return SymbolInstance(
        lib_id=lib_id,
        reference=reference,
        value=value,
        position=Point(x, y),
        rotation=rotation % 360,
        mirror=mirror,
    )


def _read_wire(node: sexpr.SList) -> Optional[WireSegment]:
    pts = node.find("pts")
    if pts is None:
        return None
    xy = [p.atoms() for p in pts.find_all("xy")]
    if len(xy) < 2:
        return None
    a = Point(float(xy[0][0]), float(xy[0][1]))
    b = Point(float(xy[1][0]), float(xy[1][1]))
    if a == b:
        return None
    return WireSegment(a, b)


def _read_label(node: sexpr.SList, tag: str, reference: str) -> LabelInstance:
    text = str(node.children[1].value)
    if tag == "label":
        label_type = "local"
    else:
        shape_node = node.find("shape")
        shape = str(shape_node.atoms()[0]) if shape_node and shape_node.atoms() \
            else "passive"
        label_type = _SHAPE_TO_TYPE.get(shape, "global_passive")
    at = node.find("at")
    values = at.atoms() if at else [0, 0]
    x, y = float(values[0]), float(values[1])
    orientation = int(values[2]) if len(values) >= 3 else 0
    return LabelInstance(
        text=text,
        position=Point(x, y),
        orientation=orientation % 360,
        label_type=label_type,
        reference=reference,
    )
