"""Deterministic fixture and corpus construction for the test suite.

make_golden reconstructs the reference design byte-for-byte reproducibly;
generate_corpus builds seeded random designs from known-good cluster
templates (grid-aligned, junctions only where wires end on other wires,
labels always on wire stubs)."""

from __future__ import annotations

import random
from typing import Callable, Dict, List, Tuple

from schcode import (Junction, LabelInstance, Point, Schematic,
                     SymbolInstance, SymbolLibrary, WireSegment)

GOLDEN_SYMBOLS = [
    ("Regulator_Linear:AP2112K-1.8", "U1", "AP2112K-1.8",
     (120.65, 104.59), 0, "none"),
    ("power:VAA", "#PWR1", "VIN", (100.33, 109.67), 0, "none"),
    ("Device:C", "C4", "1uF", (100.33, 99.51), 0, "none"),
    ("power:GND", "#PWR_C4", "GND", (100.33, 80.46), 0, "none"),
    ("power:+1V8", "#PWR_1V8", "+1V8", (134.62, 109.67), 0, "none"),
    ("Connector:TestPoint", "TP1", "TP1", (137.16, 107.13), 270, "x"),
    ("Device:LED", "D1", "LED", (148.59, 108.4), 90, "none"),
    ("power:+1V8", "#PWR_1V1", "+1V8", (148.59, 118.56), 0, "none"),
    ("Device:R", "R9", "220", (148.59, 96.97), 0, "none"),
    ("Jumper:SolderJumper_2_Open", "JP5", "LED", (148.59, 86.81), 270,
     "none"),
    ("power:GND", "#PWR_R9", "GND", (148.59, 80.46), 0, "none"),
]

GOLDEN_WIRES = [
    ((106.68, 107.13), (113.03, 107.13)),
    ((100.33, 91.89), (100.33, 95.7)),
    ((120.65, 91.89), (120.65, 96.97)),
    ((100.33, 80.46), (100.33, 91.89)),
    ((134.62, 109.67), (134.62, 107.13)),
    ((100.33, 103.32), (100.33, 107.13)),
    ((106.68, 104.59), (106.68, 107.13)),
    ((100.33, 107.13), (100.33, 109.67)),
    ((106.68, 104.59), (113.03, 104.59)),
    ((128.27, 107.13), (134.62, 107.13)),
    ((100.33, 91.89), (120.65, 91.89)),
    ((100.33, 107.13), (106.68, 107.13)),
    ((134.62, 107.13), (137.16, 107.13)),
]

GOLDEN_JUNCTIONS = [
    (100.33, 91.89),
    (100.33, 107.13),
    (106.68, 107.13),
    (134.62, 107.13),
]

GOLDEN_WIRES_2 = [
    ((148.59, 104.59), (148.59, 100.78)),
    ((148.59, 83.0), (148.59, 80.46)),
    ((148.59, 93.16), (148.59, 90.62)),
    ((148.59, 118.56), (148.59, 112.21)),
]


def _embed(sch: Schematic, lib: SymbolLibrary) -> Schematic:
    for inst in sch.symbols:
        sch.embedded_lib[inst.lib_id] = lib.get(inst.lib_id)
    return sch


def make_golden(lib: SymbolLibrary) -> Schematic:
    """The reference regulator + LED design, source coordinates."""
    sch = Schematic()
    for lib_id, ref, value, (x, y), rot, mirror in GOLDEN_SYMBOLS:
        sch.symbols.append(SymbolInstance(
            lib_id=lib_id, reference=ref, value=value,
            position=Point(x, y), rotation=rot, mirror=mirror))
    for (ax, ay), (bx, by) in GOLDEN_WIRES + GOLDEN_WIRES_2:
        sch.wires.append(WireSegment(Point(ax, ay), Point(bx, by)))
    for x, y in GOLDEN_JUNCTIONS:
        sch.junctions.append(Junction(Point(x, y)))
    return _embed(sch, lib)


# ---------------------------------------------------------------------------
# Random corpus


class _Builder:
    """Accumulates one design; hands out unique references."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.sch = Schematic()
        self.counters: Dict[str, int] = {}
        self.label_texts: List[str] = []
        # Each regulator must drive its own rail or ERC flags a
        # driver conflict when the rails merge by name.
        self.rail_pool: List[str] = rng.sample(["+1V8", "VAA"], 2)

    def ref(self, prefix: str) -> str:
        self.counters[prefix] = self.counters.get(prefix, 0) + 1
        return f"{prefix}{self.counters[prefix]}"

    def symbol(self, lib_id: str, prefix: str, value: str, x: float,
               y: float, rotation: int = 0, mirror: str = "none") -> str:
        reference = self.ref(prefix)
        self.sch.symbols.append(SymbolInstance(
            lib_id=lib_id, reference=reference, value=value,
            position=Point(round(x, 4), round(y, 4)), rotation=rotation,
            mirror=mirror))
        return reference

    def wire(self, a: Tuple[float, float], b: Tuple[float, float]) -> None:
        self.sch.wires.append(WireSegment(
            Point(round(a[0], 4), round(a[1], 4)),
            Point(round(b[0], 4), round(b[1], 4))))

    def junction(self, x: float, y: float) -> None:
        self.sch.junctions.append(Junction(Point(round(x, 4), round(y, 4))))

    def label(self, text: str, x: float, y: float, orientation: int = 0,
              label_type: str = "global_bidirectional") -> None:
        reference = self.ref("LBL")
        self.sch.labels.append(LabelInstance(
            text=text, position=Point(round(x, 4), round(y, 4)),
            orientation=orientation, label_type=label_type,
            reference=reference))
        self.label_texts.append(text)


def _tpl_regulator(b: _Builder, x: float, y: float) -> None:
    """Regulator with input cap, output test point, and rails."""
    rail = b.rail_pool.pop()
    cap = b.rng.choice(["1uF", "100nF", "10uF"])
    b.symbol("Regulator_Linear:AP2112K-1.8", "U", "AP2112K-1.8", x, y)
    b.symbol("power:VAA", "#PWR", "VIN", x - 20.32, y + 5.08)
    b.symbol("Device:C", "C", cap, x - 20.32, y - 5.08)
    b.symbol("power:GND", "#PWR", "GND", x - 20.32, y - 24.13)
    b.symbol(f"power:{rail}", "#PWR", rail, x + 13.97, y + 5.08)
    b.symbol("Connector:TestPoint", "TP", "TP", x + 16.51, y + 2.54,
             rotation=270, mirror="x")
    # VIN rail: flag, cap top, VIN and EN pins
    b.wire((x - 20.32, y - 1.27), (x - 20.32, y + 2.54))
    b.wire((x - 20.32, y + 2.54), (x - 20.32, y + 5.08))
    b.wire((x - 20.32, y + 2.54), (x - 13.97, y + 2.54))
    b.wire((x - 13.97, y + 2.54), (x - 7.62, y + 2.54))
    b.wire((x - 13.97, y), (x - 13.97, y + 2.54))
    b.wire((x - 13.97, y), (x - 7.62, y))
    b.junction(x - 20.32, y + 2.54)
    b.junction(x - 13.97, y + 2.54)
    # GND: cap bottom joins regulator ground
    b.wire((x - 20.32, y - 8.89), (x - 20.32, y - 12.7))
    b.wire((x - 20.32, y - 12.7), (x - 20.32, y - 24.13))
    b.wire((x - 20.32, y - 12.7), (x, y - 12.7))
    b.wire((x, y - 12.7), (x, y - 7.62))
    b.junction(x - 20.32, y - 12.7)
    # VOUT rail: flag and test point
    b.wire((x + 7.62, y + 2.54), (x + 13.97, y + 2.54))
    b.wire((x + 13.97, y + 5.08), (x + 13.97, y + 2.54))
    b.wire((x + 13.97, y + 2.54), (x + 16.51, y + 2.54))
    b.junction(x + 13.97, y + 2.54)


def _tpl_led_chain(b: _Builder, x: float, y: float) -> None:
    """Rail -> LED -> resistor -> jumper -> ground, vertical stack."""
    rail = b.rng.choice(["+1V8", "VAA"])
    ohms = b.rng.choice(["220", "1k", "4k7"])
    b.symbol(f"power:{rail}", "#PWR", rail, x, y + 10.16)
    b.symbol("Device:LED", "D", "LED", x, y, rotation=90)
    b.symbol("Device:R", "R", ohms, x, y - 11.43)
    b.symbol("Jumper:SolderJumper_2_Open", "JP", "LED", x, y - 21.59,
             rotation=270)
    b.symbol("power:GND", "#PWR", "GND", x, y - 27.94)
    b.wire((x, y + 10.16), (x, y + 3.81))
    b.wire((x, y - 3.81), (x, y - 11.43 + 3.81))
    b.wire((x, y - 11.43 - 3.81), (x, y - 21.59 + 3.81))
    b.wire((x, y - 21.59 - 3.81), (x, y - 27.94))


def _tpl_tap(b: _Builder, x: float, y: float) -> None:
    """Two resistors on a bus with a capacitor tapped mid-span (junction
    from an endpoint landing on the bus interior) and a labelled stub."""
    text = b.rng.choice(b.label_texts) if (b.label_texts
                                           and b.rng.random() < 0.4) \
        else f"SIG{b.rng.randint(1, 9)}"
    ohms = b.rng.choice(["10k", "47k"])
    ra = x
    rb = x + 20.32
    b.symbol("Device:R", "R", ohms, ra, y)
    b.symbol("Device:R", "R", ohms, rb, y)
    b.symbol("Device:C", "C", "100nF", x + 10.16, y + 10.16)
    b.symbol("power:GND", "#PWR", "GND", x + 10.16, y + 16.51)
    b.wire((ra, y + 3.81), (rb, y + 3.81))
    b.wire((x + 10.16, y + 6.35), (x + 10.16, y + 3.81))
    b.junction(x + 10.16, y + 3.81)
    b.wire((x + 10.16, y + 13.97), (x + 10.16, y + 16.51))
    b.wire((rb, y - 3.81), (rb, y - 6.35))
    b.label(text, rb, y - 6.35, orientation=90)


def _tpl_crossing(b: _Builder, x: float, y: float) -> None:
    """A vertical and a horizontal wire that cross without a junction;
    the nets must stay separate."""
    b.symbol("Device:R", "R", "1k", x, y)
    b.symbol("power:GND", "#PWR", "GND", x, y + 16.51)
    b.symbol("Device:C", "C", "1uF", x - 10.16, y + 10.16, rotation=90)
    b.symbol("Connector:TestPoint", "TP", "TP", x + 6.35, y + 10.16,
             rotation=270, mirror="x")
    b.wire((x, y + 3.81), (x, y + 16.51))
    b.wire((x - 10.16 + 3.81, y + 10.16), (x + 6.35, y + 10.16))


def _tpl_tp_label(b: _Builder, x: float, y: float) -> None:
    """Test point with a labelled stub (exercises name merges when the
    text repeats in another cluster)."""
    text = b.rng.choice(b.label_texts) if (b.label_texts
                                           and b.rng.random() < 0.5) \
        else f"NET{b.rng.randint(1, 9)}"
    b.symbol("Connector:TestPoint", "TP", "TP", x, y, rotation=0)
    b.wire((x, y), (x, y - 2.54))
    b.label(text, x, y - 2.54, orientation=90)


_TEMPLATES: List[Callable] = [_tpl_regulator, _tpl_led_chain, _tpl_tap,
                              _tpl_crossing, _tpl_tp_label]


def generate_design(seed: int, lib: SymbolLibrary) -> Schematic:
    """One seeded random design built from cluster templates."""
    rng = random.Random(seed)
    b = _Builder(rng)
    n_clusters = rng.randint(1, 4)
    base_x = 101.6
    base_y = 101.6
    for i in range(n_clusters):
        template = rng.choice(_TEMPLATES)
        if template is _tpl_regulator and not b.rail_pool:
            template = _tpl_led_chain
        x = base_x + i * 63.5 + rng.randrange(0, 3) * 2.54
        y = base_y + rng.randrange(-2, 3) * 5.08
        template(b, x, y)
    return _embed(b.sch, lib)


def generate_corpus(lib: SymbolLibrary, count: int = 30,
                    seed: int = 20230415) -> List[Schematic]:
    rng = random.Random(seed)
    return [generate_design(rng.randrange(1 << 30), lib)
            for _ in range(count)]


def generate_span_extremes(lib: SymbolLibrary) -> List[Schematic]:
    """Two deterministic designs pinning the corpus size span: a 2-symbol
    minimal circuit and a 40-symbol sheet of crossing clusters."""
    b = _Builder(random.Random(7))
    b.symbol("Device:R", "R", "1k", 101.6, 101.6)
    b.symbol("power:GND", "#PWR", "GND", 101.6, 109.22)
    b.wire((101.6, 105.41), (101.6, 109.22))
    tiny = _embed(b.sch, lib)

    b = _Builder(random.Random(11))
    for i in range(10):
        _tpl_crossing(b, 101.6 + (i % 5) * 63.5, 101.6 + (i // 5) * 63.5)
    large = _embed(b.sch, lib)
    return [tiny, large]
