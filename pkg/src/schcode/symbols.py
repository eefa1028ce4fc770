"""Symbol-library loading and pin-geometry queries."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from . import sexpr
from .errors import (
    AmbiguousPinName,
    DuplicateSymbolName,
    NoSuchPin,
    NotALibrary,
    UnresolvedLibId,
)
from .geometry import Point, Rect, transform_offset

ELECTRICAL_TYPES = frozenset({
    "input", "output", "bidirectional", "power_in", "power_out", "passive",
    "open_collector", "tri_state", "no_connect", "free", "unspecified",
})

_GRAPHIC_TAGS = ("rectangle", "polyline", "circle", "arc")


@dataclass(frozen=True)
class PinDef:
    id: str
    name: str  # "~" for unnamed pins
    local_offset: Point
    orientation: int
    electrical_type: str

    @property
    def is_named(self) -> bool:
        return self.name not in ("", "~")


@dataclass
class SymbolDef:
    lib_id: str
    pins: List[PinDef]
    body_bbox: Rect
    default_reference_prefix: str
    is_power: bool
    source: sexpr.SList

    def pin_by_id(self, pin_id: str) -> Optional[PinDef]:
        for pin in self.pins:
            if pin.id == pin_id:
                return pin
        return None

    def source_with_lib_id(self) -> sexpr.SList:
        """Copy of the library node renamed to the full lib_id, for embedding."""
        node = copy.deepcopy(self.source)
        node.children[1] = sexpr.Atom.string(self.lib_id)
        return node


@dataclass
class SymbolLibrary:
    defs: Dict[str, SymbolDef] = field(default_factory=dict)

    def get(self, lib_id: str) -> SymbolDef:
        try:
            return self.defs[lib_id]
        except KeyError:
            raise UnresolvedLibId(lib_id) from None

    def __contains__(self, lib_id: str) -> bool:
        return lib_id in self.defs

    def merged_with(self, other: "SymbolLibrary") -> "SymbolLibrary":
        defs = dict(self.defs)
        defs.update(other.defs)
        return SymbolLibrary(defs)


def load_symbol_library(root: sexpr.SExprNode, library_name: str) -> SymbolLibrary:
    """Build a SymbolLibrary from a parsed .kicad_sym tree."""
    if not isinstance(root, sexpr.SList) or root.tag != "kicad_symbol_lib":
        raise NotALibrary("root tag is not kicad_symbol_lib")
    library = SymbolLibrary()
    for node in root.find_all("symbol"):
        name = _symbol_name(node)
        lib_id = f"{library_name}:{name}"
        if lib_id in library.defs:
            raise DuplicateSymbolName(name)
        library.defs[lib_id] = parse_symbol_def(node, lib_id)
    return library


def load_library_dirs(paths) -> SymbolLibrary:
    """Load every .kicad_sym under the given directories (stem = library name)."""
    library = SymbolLibrary()
    for directory in paths:
        for path in sorted(Path(directory).glob("*.kicad_sym")):
            root = sexpr.parse_sexpr(path.read_text(encoding="utf-8"))
            library = library.merged_with(
                load_symbol_library(root, path.stem))
    return library


def parse_symbol_def(node: sexpr.SList, lib_id: str) -> SymbolDef:
    """Flatten one `symbol` node (default unit only) into a SymbolDef."""
    pins: List[PinDef] = []
    extents: list = [(0.0, 0.0)]
    prefix = "U"
    is_power = any(isinstance(c, sexpr.SList) and c.tag == "power"
                   for c in node.children)

    for prop in node.find_all("property"):
        values = prop.atoms()
        if len(values) >= 2 and values[0] == "Reference":
            prefix = str(values[1])

    def consume(container: sexpr.SList) -> None:
        for child in container.find_all("pin"):
            pins.append(_parse_pin(child, lib_id))
        for tag in _GRAPHIC_TAGS:
            for child in container.find_all(tag):
                extents.extend(_graphic_points(child))

    consume(node)
    for sub in node.find_all("symbol"):
        if _sub_symbol_unit(sub) in (0, 1):
            consume(sub)

    seen = set()
    for pin in pins:
        if pin.id in seen:
            raise DuplicateSymbolName(f"{lib_id} pin {pin.id}")
        seen.add(pin.id)

    return SymbolDef(
        lib_id=lib_id,
        pins=pins,
        body_bbox=Rect.from_points(extents),
        default_reference_prefix=prefix,
        is_power=is_power,
        source=node,
    )


def resolve_pin(symbol_def: SymbolDef, pin_query: str) -> PinDef:
    """Match by name first, then id; single-pin symbols accept "1"."""
    by_name = [p for p in symbol_def.pins if p.is_named and p.name == pin_query]
    if len(by_name) == 1:
        return by_name[0]
    by_id = symbol_def.pin_by_id(pin_query)
    if by_id is not None:
        return by_id
    if len(by_name) > 1:
        raise AmbiguousPinName(pin_query, len(by_name))
    if pin_query == "1" and len(symbol_def.pins) == 1:
        return symbol_def.pins[0]
    raise NoSuchPin(f"{symbol_def.lib_id}:{pin_query}")


def pin_world_location(inst, pin: PinDef) -> Point:
    """World position of a pin: position + M(rotation, mirror) . offset."""
    offset = transform_offset(pin.local_offset.x, pin.local_offset.y,
                              inst.rotation, inst.mirror)
    return Point(round(inst.position.x + offset.x, 4),
                 round(inst.position.y + offset.y, 4))


def _symbol_name(node: sexpr.SList) -> str:
    if len(node.children) < 2 or not isinstance(node.children[1], sexpr.Atom):
        raise NotALibrary("symbol node has no name")
    return str(node.children[1].value)


def _sub_symbol_unit(node: sexpr.SList) -> int:
    # Sub-symbol names follow NAME_<unit>_<style>.
    parts = _symbol_name(node).rsplit("_", 2)
    if len(parts) == 3 and parts[1].isdigit():
        return int(parts[1])
    return 1


def _parse_pin(node: sexpr.SList, lib_id: str) -> PinDef:
    electrical = "passive"
    if len(node.children) > 1 and isinstance(node.children[1], sexpr.Atom):
        candidate = str(node.children[1].value)
        if candidate in ELECTRICAL_TYPES:
            electrical = candidate
    at = node.find("at")
    x, y, angle = 0.0, 0.0, 0
    if at is not None:
        values = at.atoms()
        if len(values) >= 2:
            x, y = float(values[0]), float(values[1])
        if len(values) >= 3:
            angle = int(values[2])
    name_node = node.find("name")
    number_node = node.find("number")
    name = str(name_node.atoms()[0]) if name_node and name_node.atoms() else "~"
    number = (str(number_node.atoms()[0])
              if number_node and number_node.atoms() else "")
    return PinDef(
        id=number,
        name=name,
        local_offset=Point(x, y),
        orientation=angle,
        electrical_type=electrical,
    )


def _graphic_points(node: sexpr.SList) -> list:
    points = []
    if node.tag == "rectangle":
        for tag in ("start", "end"):
            sub = node.find(tag)
            if sub:
                values = sub.atoms()
                points.append((float(values[0]), float(values[1])))
    elif node.tag == "polyline":
        pts = node.find("pts")
        if pts:
            for xy in pts.find_all("xy"):
                values = xy.atoms()
                points.append((float(values[0]), float(values[1])))
    elif node.tag == "circle":
        center = node.find("center")
        radius_node = node.find("radius")
        if center and radius_node:
            cx, cy = (float(v) for v in center.atoms()[:2])
            r = float(radius_node.atoms()[0])
            points.extend([(cx - r, cy - r), (cx + r, cy + r)])
    elif node.tag == "arc":
        for tag in ("start", "mid", "end"):
            sub = node.find(tag)
            if sub:
                values = sub.atoms()
                points.append((float(values[0]), float(values[1])))
    return points
