"""Connectivity rules and netlist extraction."""

from schcode.geometry import Point
from schcode.model import (Junction, LabelInstance, Schematic,
                           SymbolInstance, WireSegment)
from schcode.netgraph import (PinNode, build_connectivity_graph,
                              connected_pin_pairs, extract_netlist,
                              netlist_to_json)

GOLDEN_NETS = {
    "+1V8": {("D1", "2"), ("TP1", "1"), ("U1", "5")},
    "GND": {("C4", "2"), ("JP5", "2"), ("U1", "2")},
    "N$1": {("D1", "1"), ("R9", "1")},
    "N$2": {("JP5", "1"), ("R9", "2")},
    "VIN": {("C4", "1"), ("U1", "1"), ("U1", "3")},
}


def net_map(netlist):
    return {net.name: {(n.reference, n.pin) for n in net.nodes}
            for net in netlist.nets}


def S(ref, lib_id, value, x, y, rotation=0, mirror="none"):
    return SymbolInstance(lib_id=lib_id, reference=ref, value=value,
                          position=Point(x, y), rotation=rotation,
                          mirror=mirror)


def test_golden_netlist_frozen(golden_netlist):
    assert net_map(golden_netlist) == GOLDEN_NETS
    assert golden_netlist.conflicts == []
    assert golden_netlist.symbols["U1"] == ("Regulator_Linear:AP2112K-1.8",
                                            "AP2112K-1.8")
    assert golden_netlist.symbols["C4"] == ("Device:C", "1uF")


def test_golden_wire_only_netlist(golden, golden_wire_graph):
    nets = extract_netlist(golden_wire_graph, golden)
    got = sorted((net.name, tuple(sorted((n.reference, n.pin)
                                         for n in net.nodes)))
                 for net in nets.nets)
    assert got == [
        ("+1V8", (("D1", "2"),)),
        ("+1V8", (("TP1", "1"), ("U1", "5"))),
        ("GND", (("C4", "2"), ("U1", "2"))),
        ("GND", (("JP5", "2"),)),
        ("N$1", (("D1", "1"), ("R9", "1"))),
        ("N$2", (("JP5", "1"), ("R9", "2"))),
        ("VIN", (("C4", "1"), ("U1", "1"), ("U1", "3"))),
    ]


def test_connected_pin_pairs(golden_netlist):
    pairs = connected_pin_pairs(golden_netlist)
    assert len(pairs) == 11  # 3*C(3,2) + 2*C(2,2)
    assert frozenset({PinNode("D1", "1"), PinNode("R9", "1")}) in pairs


def test_netlist_json_shape(golden_netlist):
    doc = netlist_to_json(golden_netlist)
    assert [net["name"] for net in doc["nets"]] == [
        "+1V8", "GND", "N$1", "N$2", "VIN"]
    assert doc["nets"][0]["nodes"][0] == {"ref": "D1", "pin": "2"}


CROSS = Point(110.49, 107.95)


def crossing(with_junction: bool) -> Schematic:
    sch = Schematic(
        symbols=[S("R1", "Device:R", "1k", 100.33, CROSS.y + 3.81),
                 S("R2", "Device:R", "1k", 120.65, CROSS.y + 3.81),
                 S("R3", "Device:R", "1k", CROSS.x, 97.79 + 3.81),
                 S("R4", "Device:R", "1k", CROSS.x, 114.3 + 3.81)],
        wires=[WireSegment(Point(100.33, CROSS.y), Point(120.65, CROSS.y)),
               WireSegment(Point(CROSS.x, 105.41), Point(CROSS.x, 114.3))])
    if with_junction:
        sch.junctions.append(Junction(CROSS))
    return sch


def test_crossing_without_junction_two_nets(lib):
    sch = crossing(False)
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert sorted(sorted((n.reference, n.pin) for n in net.nodes)
                  for net in nets.nets) == [
        [("R1", "2"), ("R2", "2")], [("R3", "1"), ("R4", "2")]]


def test_crossing_with_junction_one_net(lib):
    sch = crossing(True)
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert sorted(sorted((n.reference, n.pin) for n in net.nodes)
                  for net in nets.nets) == [
        [("R1", "2"), ("R2", "2"), ("R3", "1"), ("R4", "2")]]


def test_t_touch_requires_junction(lib):
    # Vertical wire B ends on the interior of horizontal wire A.
    def t_sch(with_junction):
        sch = Schematic(
            symbols=[S("R1", "Device:R", "1k", 100.33, 111.76),
                     S("R2", "Device:R", "1k", 120.65, 111.76),
                     S("R3", "Device:R", "1k", 110.49, 97.79 + 3.81)],
            wires=[WireSegment(Point(100.33, 107.95),
                               Point(120.65, 107.95)),
                   WireSegment(Point(110.49, 105.41),
                               Point(110.49, 107.95))])
        if with_junction:
            sch.junctions.append(Junction(Point(110.49, 107.95)))
        return sch

    apart = t_sch(False)
    nets = extract_netlist(build_connectivity_graph(apart, lib), apart)
    assert len(nets.nets) == 2
    joined = t_sch(True)
    nets2 = extract_netlist(build_connectivity_graph(joined, lib), joined)
    assert len(nets2.nets) == 1
    assert {(n.reference, n.pin) for n in nets2.nets[0].nodes} == {
        ("R1", "2"), ("R2", "2"), ("R3", "1")}


def island(ref, x, lib_id="Device:R", value="1k"):
    """A resistor with a stub wire from its upper pin to (x, 100.33)."""
    sym = S(ref, lib_id, value, x, 104.14 + 3.81)
    wire = WireSegment(Point(x, 100.33), Point(x, 104.14))
    return sym, wire


def test_labels_merge_by_text(lib):
    s1, w1 = island("R1", 100.33)
    s2, w2 = island("R2", 120.65)
    sch = Schematic(symbols=[s1, s2], wires=[w1, w2],
                    labels=[LabelInstance("SIG", Point(100.33, 100.33), 0,
                                          "global_bidirectional", "L1"),
                            LabelInstance("SIG", Point(120.65, 100.33), 0,
                                          "global_bidirectional", "L2")])
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert net_map(nets) == {"SIG": {("R1", "2"), ("R2", "2")}}


def test_power_flags_merge_by_value(lib):
    s1, w1 = island("R1", 100.33)
    s2, w2 = island("R2", 120.65)
    sch = Schematic(
        symbols=[s1, s2,
                 S("#PWR1", "power:GND", "GND", 100.33, 100.33),
                 S("#PWR2", "power:GND", "GND", 120.65, 100.33)],
        wires=[w1, w2])
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert net_map(nets) == {"GND": {("R1", "2"), ("R2", "2")}}


def test_label_and_power_families_do_not_cross(lib):
    s1, w1 = island("R1", 100.33)
    s2, w2 = island("R2", 120.65)
    sch = Schematic(
        symbols=[s1, s2, S("#PWR1", "power:VAA", "VAA", 100.33, 100.33)],
        wires=[w1, w2],
        labels=[LabelInstance("VAA", Point(120.65, 100.33), 0,
                              "global_bidirectional", "L1")])
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    # Two distinct nets that happen to carry the same name.
    assert sorted((net.name, tuple(sorted((n.reference, n.pin)
                                          for n in net.nodes)))
                  for net in nets.nets) == [
        ("VAA", (("R1", "2"),)), ("VAA", (("R2", "2"),))]


def test_name_precedence_global_over_local(lib):
    sym, wire = island("R1", 105.41)
    sch = Schematic(
        symbols=[sym],
        wires=[wire, WireSegment(Point(105.41, 100.33),
                                 Point(110.49, 100.33))],
        labels=[LabelInstance("NETL", Point(110.49, 100.33), 0, "local",
                              "L1"),
                LabelInstance("NETG", Point(105.41, 100.33), 0,
                              "global_bidirectional", "L2")])
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert [net.name for net in nets.nets] == ["NETG"]


def test_name_precedence_power_over_label(lib):
    sym, wire = island("R1", 105.41)
    sch = Schematic(
        symbols=[sym, S("#PWR1", "power:VAA", "VAA", 105.41, 100.33)],
        wires=[wire],
        labels=[LabelInstance("SIG", Point(105.41, 104.14), 0,
                              "global_bidirectional", "L1")])
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert [net.name for net in nets.nets] == ["VAA"]


def test_power_short_reports_conflict(lib):
    sch = Schematic(
        symbols=[S("#PWR1", "power:GND", "GND", 100.33, 100.33),
                 S("#PWR2", "power:+1V8", "+1V8", 110.49, 100.33),
                 S("R1", "Device:R", "1k", 105.41, 104.14)],
        wires=[WireSegment(Point(100.33, 100.33), Point(105.41, 100.33)),
               WireSegment(Point(105.41, 100.33), Point(110.49, 100.33))])
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert len(nets.conflicts) == 1
    assert nets.conflicts[0].names == frozenset({"GND", "+1V8"})
    # The net is named by the alphabetically first rail, deterministically.
    assert [net.name for net in nets.nets] == ["+1V8"]


def test_netless_symbols_listed_but_no_single_vertex_nets(lib):
    sch = Schematic(symbols=[S("R1", "Device:R", "1k", 105.41, 104.14)])
    nets = extract_netlist(build_connectivity_graph(sch, lib), sch)
    assert nets.nets == []
    assert nets.symbols == {"R1": ("Device:R", "1k")}


def test_off_grid_pin_warning(lib):
    sch = Schematic(symbols=[S("R1", "Device:R", "1k", 100.0, 100.0)])
    graph = build_connectivity_graph(sch, lib)
    assert any(w.startswith("OffGridPin: R1") for w in graph.warnings)
    on_grid = Schematic(symbols=[S("R1", "Device:R", "1k", 100.33, 104.14)])
    assert build_connectivity_graph(on_grid, lib).warnings == []


def test_graph_records_name_edge_mode(golden, lib):
    with_names = build_connectivity_graph(golden, lib)
    without = build_connectivity_graph(golden, lib,
                                       include_name_edges=False)
    assert with_names.includes_name_edges
    assert not without.includes_name_edges
