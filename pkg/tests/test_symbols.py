"""Symbol library loading, pin resolution, and pin geometry transforms."""

import pytest

from schcode import sexpr, symbols
from schcode.errors import (AmbiguousPinName, NoSuchPin, NotALibrary,
                            UnresolvedLibId)
from schcode.geometry import (Point, inverse_transform_offset,
                              transform_offset)
from schcode.model import SymbolInstance
from schcode.symbols import PinDef, SymbolDef, load_symbol_library

from conftest import LIB_DIR


def test_library_contents(lib):
    for lib_id in ("Device:R", "Device:C", "Device:LED",
                   "Connector:TestPoint", "Jumper:SolderJumper_2_Open",
                   "Regulator_Linear:AP2112K-1.8", "power:GND",
                   "power:+1V8", "power:VAA"):
        assert lib_id in lib
    with pytest.raises(UnresolvedLibId):
        lib.get("Device:Nope")


def test_device_r_pins(lib):
    pins = lib.get("Device:R").pins
    assert [(p.id, p.name, p.local_offset, p.orientation, p.electrical_type)
            for p in pins] == [
        ("1", "~", Point(0.0, 3.81), 270, "passive"),
        ("2", "~", Point(0.0, -3.81), 90, "passive"),
    ]
    assert not pins[0].is_named


def test_regulator_pins(lib):
    pins = lib.get("Regulator_Linear:AP2112K-1.8").pins
    assert [(p.id, p.name, p.electrical_type) for p in pins] == [
        ("1", "VIN", "power_in"), ("2", "GND", "power_in"),
        ("3", "EN", "input"), ("4", "NC", "no_connect"),
        ("5", "VOUT", "power_out")]


def test_power_flag_definition(lib):
    gnd = lib.get("power:GND")
    assert gnd.is_power
    assert [(p.id, p.name, p.local_offset) for p in gnd.pins] == [
        ("1", "GND", Point(0.0, 0.0))]


def test_resolve_pin_by_id_and_name(lib):
    udef = lib.get("Regulator_Linear:AP2112K-1.8")
    assert symbols.resolve_pin(udef, "VOUT").id == "5"
    assert symbols.resolve_pin(udef, "5").id == "5"
    tp = lib.get("Connector:TestPoint")
    # The test point's single pin answers to its id and its display name.
    assert symbols.resolve_pin(tp, "1").id == "1"
    assert symbols.resolve_pin(tp, "TP1").id == "1"
    with pytest.raises(NoSuchPin):
        symbols.resolve_pin(udef, "VCC")


def test_resolve_pin_ambiguity():
    twin = SymbolDef(
        lib_id="Fake:Twin",
        pins=[PinDef("1", "A", Point(0, 0), 0, "passive"),
              PinDef("2", "A", Point(0, 2.54), 0, "passive")],
        body_bbox=None, default_reference_prefix="U", is_power=False,
        source=sexpr.SList([]))
    with pytest.raises(AmbiguousPinName):
        symbols.resolve_pin(twin, "A")
    assert symbols.resolve_pin(twin, "2").id == "2"


def test_transform_offset_spec_examples():
    # Offset (2.54, 0), rotation 90: lands 2.54 above (y-down) the anchor.
    assert transform_offset(2.54, 0, 90, "none") == Point(0, -2.54)
    pos = Point(100.0, 100.0)
    moved = transform_offset(2.54, 0, 90, "none")
    assert (pos.x + moved.x, pos.y + moved.y) == (100.0, 97.46)
    # Mirror about x negates the local y only: an x-offset is unchanged.
    assert transform_offset(2.54, 0, 0, "x") == Point(2.54, 0)
    assert transform_offset(0, 2.54, 0, "x") == Point(0, -2.54)
    # Mirror about y negates the local x only.
    assert transform_offset(2.54, 0, 0, "y") == Point(-2.54, 0)


def test_transform_rotation_steps():
    v = Point(1.27, 2.54)
    assert transform_offset(*v, 0, "none") == v
    assert transform_offset(*v, 90, "none") == Point(2.54, -1.27)
    assert transform_offset(*v, 180, "none") == Point(-1.27, -2.54)
    assert transform_offset(*v, 270, "none") == Point(-2.54, 1.27)


def test_transform_four_quarters_identity():
    v = Point(3.81, -1.27)
    out = v
    for _ in range(4):
        out = transform_offset(out.x, out.y, 90, "none")
    assert out == v


def test_inverse_transform_round_trip():
    for rotation in (0, 90, 180, 270):
        for mirror in ("none", "x", "y"):
            moved = transform_offset(1.27, -2.54, rotation, mirror)
            back = inverse_transform_offset(moved.x, moved.y, rotation,
                                            mirror)
            assert back == Point(1.27, -2.54), (rotation, mirror)


def test_pin_world_location(lib):
    u1 = SymbolInstance(lib_id="Regulator_Linear:AP2112K-1.8",
                        reference="U1", value="AP2112K-1.8",
                        position=Point(120.65, 104.59))
    udef = lib.get(u1.lib_id)
    assert symbols.pin_world_location(u1, udef.pin_by_id("5")) == \
        Point(128.27, 107.13)
    assert symbols.pin_world_location(u1, udef.pin_by_id("1")) == \
        Point(113.03, 107.13)
    assert symbols.pin_world_location(u1, udef.pin_by_id("2")) == \
        Point(120.65, 96.97)
    r = SymbolInstance(lib_id="Device:R", reference="R1", value="1k",
                       position=Point(105.41, 104.14))
    rdef = lib.get("Device:R")
    assert symbols.pin_world_location(r, rdef.pin_by_id("2")) == \
        Point(105.41, 100.33)
    assert symbols.pin_world_location(r, rdef.pin_by_id("1")) == \
        Point(105.41, 107.95)


def test_load_symbol_library_errors():
    with pytest.raises(NotALibrary):
        load_symbol_library(sexpr.parse_sexpr("(foo)"), "X")


def test_load_symbol_library_direct():
    text = (LIB_DIR / "Device.kicad_sym").read_text()
    loaded = load_symbol_library(sexpr.parse_sexpr(text), "Device")
    assert "Device:R" in loaded
    assert loaded.get("Device:R").default_reference_prefix == "R"


def test_merged_with_prefers_other(lib):
    other = load_symbol_library(
        sexpr.parse_sexpr((LIB_DIR / "Device.kicad_sym").read_text()),
        "Device")
    merged = lib.merged_with(other)
    assert "power:GND" in merged and "Device:R" in merged
