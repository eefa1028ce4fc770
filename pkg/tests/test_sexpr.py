"""Lexeme-preserving s-expression reader/writer."""

import pytest

from schcode import sexpr
from schcode.errors import DepthExceeded, UnbalancedParen, UnterminatedString
from schcode.sexpr import Atom, SList


def test_atom_kinds_and_values():
    root = sexpr.parse_sexpr('(a 1 2.5 -3 x/y "s")')
    kinds = [c.kind for c in root.children]
    assert kinds == ["symbol", "integer", "real", "integer", "symbol",
                     "string"]
    assert [c.value for c in root.children] == ["a", 1, 2.5, -3, "x/y", "s"]


def test_lexeme_preserved_verbatim():
    # 1.270 must not normalize to 1.27 on a read/write cycle.
    text = "(at 1.270 -0.0 1e0)"
    root = sexpr.parse_sexpr(text)
    assert sexpr.write_sexpr(root) == text


def test_string_escapes_round_trip():
    raw = '(t "a\\"b\\nc\\td\\\\e")'
    root = sexpr.parse_sexpr(raw)
    assert root.children[1].value == 'a"b\nc\td\\e'
    assert sexpr.write_sexpr(root) == raw


def test_escape_unescape_inverse():
    value = 'quote " slash \\ nl \n cr \r tab \t end'
    assert sexpr.unescape_string(sexpr.escape_string(value)) == value


def test_find_and_find_all_direct_children_only():
    root = sexpr.parse_sexpr("(a (b 1) (c (b 2)) (b 3))")
    assert root.find("b").children[1].value == 1
    assert [n.children[1].value for n in root.find_all("b")] == [1, 3]
    assert root.find("missing") is None


def test_atoms_helper_skips_tag_and_lists():
    root = sexpr.parse_sexpr('(pts 1 (xy 2 3) "s")')
    assert root.atoms() == [1, "s"]


def test_format_number_minimal_decimal():
    assert sexpr.format_number(5) == "5"
    assert sexpr.format_number(2.0) == "2"
    assert sexpr.format_number(-3.0) == "-3"
    assert sexpr.format_number(1.27) == "1.27"
    assert sexpr.format_number(0.0) == "0"
    assert sexpr.format_number(104.59) == "104.59"
    assert sexpr.format_number(1.234567) == "1.234567"


def test_atom_number_constructor_kind():
    assert Atom.number(2.0).kind == "integer"
    assert Atom.number(2.5).kind == "real"
    assert Atom.number(7) == Atom("integer", "7")


def test_unbalanced_and_unterminated():
    with pytest.raises(UnbalancedParen):
        sexpr.parse_sexpr("(a")
    with pytest.raises(UnbalancedParen):
        sexpr.parse_sexpr(")")
    with pytest.raises(UnterminatedString):
        sexpr.parse_sexpr('(a "x')


def test_depth_limit():
    sexpr.parse_sexpr("(" * 9999 + "a" + ")" * 9999)
    with pytest.raises(DepthExceeded):
        sexpr.parse_sexpr("(" * 10001 + "a" + ")" * 10001)


def test_golden_byte_round_trip(golden_text):
    root = sexpr.parse_sexpr(golden_text)
    assert sexpr.write_sexpr(root) == golden_text


def test_library_files_structural_round_trip():
    from conftest import LIB_DIR
    for path in sorted(LIB_DIR.glob("*.kicad_sym")):
        text = path.read_text()
        root = sexpr.parse_sexpr(text)
        again = sexpr.parse_sexpr(sexpr.write_sexpr(root))
        assert again == root, path.name


def test_slist_equality_and_tag():
    a = sexpr.parse_sexpr("(pin (at 0 0))")
    b = sexpr.parse_sexpr("(pin (at 0 0))")
    c = sexpr.parse_sexpr("(pin (at 0 1))")
    assert a == b and a != c
    assert a.tag == "pin"
    assert SList([]).tag is None
