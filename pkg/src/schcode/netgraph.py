"""Connectivity graph and netlist extraction.

Pins, wire endpoints, labels, and power pins are vertices; wire segments,
coincident points, junction-gated T-touches, and equal-name merges are
edges. Nets are connected components projected onto component-symbol pins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .geometry import (
    GRID,
    Point,
    point_inside_segment,
    quantize,
)
from .model import Schematic
from .symbols import SymbolLibrary, pin_world_location


@dataclass(frozen=True)
class NetVertex:
    kind: str  # "pin" | "wire_end" | "label" | "power"
    point: Point
    reference: str = ""
    pin_id: str = ""
    pin_name: str = ""
    electrical_type: str = ""
    text: str = ""  # label text or power net name
    label_type: str = ""


@dataclass(frozen=True)
class PinNode:
    reference: str
    pin: str

    def key(self) -> Tuple[str, str]:
        return (self.reference, self.pin)


@dataclass(frozen=True)
class NetNameConflict:
    names: FrozenSet[str]


@dataclass
class Net:
    name: str
    nodes: FrozenSet[PinNode]
    power_names: FrozenSet[str] = frozenset()
    label_texts: FrozenSet[str] = frozenset()
    synthesized: bool = False

    def sorted_nodes(self) -> List[PinNode]:
        return sorted(self.nodes, key=PinNode.key)


@dataclass
class Netlist:
    nets: List[Net] = field(default_factory=list)
    symbols: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    conflicts: List[NetNameConflict] = field(default_factory=list)

    def net_by_name(self, name: str) -> Optional[Net]:
        for net in self.nets:
            if net.name == name:
                return net
        return None

    def node_sets(self) -> List[FrozenSet[PinNode]]:
        return [net.nodes for net in self.nets]


class ConnectivityGraph:
    """Union-find over NetVertex items."""

    def __init__(self, vertices: List[NetVertex]):
        self.vertices = vertices
        self._parent = list(range(len(vertices)))
        self.warnings: List[str] = []
        self.includes_name_edges = False

    def find(self, i: int) -> int:
        parent = self._parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self._parent[max(ri, rj)] = min(ri, rj)

    def components(self) -> List[List[int]]:
        """Vertex indices per component, ordered by smallest member."""
        groups: Dict[int, List[int]] = {}
        for i in range(len(self.vertices)):
            groups.setdefault(self.find(i), []).append(i)
        return [groups[root] for root in sorted(groups)]


def build_connectivity_graph(sch: Schematic, lib: SymbolLibrary,
                             include_name_edges: bool = True
                             ) -> ConnectivityGraph:
    """Vertices and edges per the connectivity rules; see module doc."""
    merged = sch.library(lib)
    vertices: List[NetVertex] = []
    wire_ends: List[Tuple[int, int]] = []  # vertex index pair per wire

    for inst in sch.symbols:
        definition = merged.get(inst.lib_id)
        for pin in definition.pins:
            world = pin_world_location(inst, pin)
            if inst.kind == "power":
                vertices.append(NetVertex(
                    kind="power", point=world, reference=inst.reference,
                    pin_id=pin.id, text=inst.value))
            else:
                vertices.append(NetVertex(
                    kind="pin", point=world, reference=inst.reference,
                    pin_id=pin.id, pin_name=pin.name,
                    electrical_type=pin.electrical_type))

    for wire in sch.wires:
        a = len(vertices)
        vertices.append(NetVertex(kind="wire_end", point=wire.a))
        vertices.append(NetVertex(kind="wire_end", point=wire.b))
        wire_ends.append((a, a + 1))

    for label in sch.labels:
        vertices.append(NetVertex(
            kind="label", point=label.position, text=label.text,
            label_type=label.label_type, reference=label.reference))

    # A junction is itself a vertex so that a dot at an X-crossing (both
    # wires passing through their interiors) still joins the wires.
    for junction in sch.junctions:
        vertices.append(NetVertex(kind="junction", point=junction.position))

    graph = ConnectivityGraph(vertices)

    for vertex in vertices:
        if vertex.kind != "pin":
            continue
        for coord in vertex.point:
            if abs(coord / GRID - round(coord / GRID)) > 1e-6:
                graph.warnings.append(
                    f"OffGridPin: {vertex.reference} pin {vertex.pin_id} "
                    f"at {vertex.point}")
                break

    # (i) wire segments connect their endpoints.
    for a, b in wire_ends:
        graph.union(a, b)

    # (ii) coincident points unify.
    by_point: Dict[tuple, int] = {}
    for i, vertex in enumerate(vertices):
        key = quantize(vertex.point)
        if key in by_point:
            graph.union(by_point[key], i)
        else:
            by_point[key] = i

    # (iii) T-touch: a vertex on a segment interior connects only through
    # an explicit junction at that point.
    junction_points: Set[tuple] = {quantize(j.position)
                                   for j in sch.junctions}
    for i, vertex in enumerate(vertices):
        if quantize(vertex.point) not in junction_points:
            continue
        for (a, b_), wire in zip(wire_ends, sch.wires):
            if point_inside_segment(vertex.point, wire.a, wire.b):
                graph.union(i, a)

    # (iv) name edges: equal label texts; equal power net names.
    if include_name_edges:
        graph.includes_name_edges = True
        first_label: Dict[str, int] = {}
        first_power: Dict[str, int] = {}
        for i, vertex in enumerate(vertices):
            if vertex.kind == "label":
                if vertex.text in first_label:
                    graph.union(first_label[vertex.text], i)
                else:
                    first_label[vertex.text] = i
            elif vertex.kind == "power":
                if vertex.text in first_power:
                    graph.union(first_power[vertex.text], i)
                else:
                    first_power[vertex.text] = i

    return graph


def extract_netlist(graph: ConnectivityGraph, sch: Schematic) -> Netlist:
    """One Net per component with at least one component-symbol pin."""
    netlist = Netlist()
    for inst in sch.symbols:
        if inst.kind == "component":
            netlist.symbols[inst.reference] = (inst.lib_id, inst.value)

    named: List[Net] = []
    unnamed: List[Net] = []
    for indices in graph.components():
        if len(indices) == 1:
            continue  # an isolated vertex is not a net
        nodes = set()
        power_names = set()
        global_texts = set()
        local_texts = set()
        for i in indices:
            vertex = graph.vertices[i]
            if vertex.kind == "pin":
                nodes.add(PinNode(vertex.reference, vertex.pin_id))
            elif vertex.kind == "power":
                power_names.add(vertex.text)
            elif vertex.kind == "label":
                if vertex.label_type == "local":
                    local_texts.add(vertex.text)
                else:
                    global_texts.add(vertex.text)
        if not nodes:
            continue
        if len(power_names) > 1:
            netlist.conflicts.append(
                NetNameConflict(frozenset(power_names)))
        net = Net(
            name="",
            nodes=frozenset(nodes),
            power_names=frozenset(power_names),
            label_texts=frozenset(global_texts | local_texts),
        )
        if power_names:
            net.name = min(power_names)
        elif global_texts:
            net.name = min(global_texts)
        elif local_texts:
            net.name = min(local_texts)
        if net.name:
            named.append(net)
        else:
            unnamed.append(net)

    unnamed.sort(key=lambda net: min(node.key() for node in net.nodes))
    for ordinal, net in enumerate(unnamed, start=1):
        net.name = f"N${ordinal}"
        net.synthesized = True

    netlist.nets = sorted(
        named + unnamed,
        key=lambda net: (net.name, min(node.key() for node in net.nodes)))
    return netlist


def connected_pin_pairs(netlist: Netlist) -> Set[FrozenSet[PinNode]]:
    """All unordered node pairs within each net."""
    pairs: Set[FrozenSet[PinNode]] = set()
    for net in netlist.nets:
        nodes = net.sorted_nodes()
        for i, a in enumerate(nodes):
            for b in nodes[i + 1:]:
                pairs.add(frozenset((a, b)))
    return pairs


def netlist_to_json(netlist: Netlist) -> dict:
    """The documented export shape, sorted by name then node."""
    nets = []
    for net in sorted(netlist.nets,
                      key=lambda n: (n.name,
                                     min(node.key() for node in n.nodes))):
        nets.append({
            "name": net.name,
            "nodes": [{"ref": node.reference, "pin": node.pin}
                      for node in net.sorted_nodes()],
        })
    return {"nets": nets}
