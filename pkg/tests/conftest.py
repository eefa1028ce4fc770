"""Shared fixtures: the golden schematic, its libraries, and path helpers."""

import pathlib

import pytest

from schcode import model, netgraph, sexpr
from schcode.symbols import load_library_dirs

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
LIB_DIR = FIXTURES / "libs"
GOLDEN_PATH = FIXTURES / "golden" / "regulator_led.kicad_sch"
PROGRAM_DIR = FIXTURES / "programs"


def program_path(level: str) -> pathlib.Path:
    return PROGRAM_DIR / f"regulator_led_{level.lower()}.schcode"


@pytest.fixture(scope="session")
def lib():
    return load_library_dirs([LIB_DIR])


@pytest.fixture(scope="session")
def golden_text():
    return GOLDEN_PATH.read_text()


@pytest.fixture(scope="session")
def golden(golden_text):
    return model.read_schematic(sexpr.parse_sexpr(golden_text))


@pytest.fixture(scope="session")
def golden_graph(golden, lib):
    return netgraph.build_connectivity_graph(golden, lib)


@pytest.fixture(scope="session")
def golden_wire_graph(golden, lib):
    return netgraph.build_connectivity_graph(golden, lib,
                                             include_name_edges=False)


@pytest.fixture(scope="session")
def golden_netlist(golden, golden_graph):
    return netgraph.extract_netlist(golden_graph, golden)
