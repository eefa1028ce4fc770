"""schcode: a schematic/code conversion and evaluation toolkit.

Parses and writes KiCad schematics, converts them to compact placement
programs at three ablation levels, interprets those programs back into
schematics, and scores the results (validity, overlaps, netlist
similarity, code complexity).
"""

from .codegen import (AddLabel, AddNewWire, AddSymbol, AnchorRef, ConnectPins,
                      Literal, PinAnchor, Program, SetAnchor,
                      WriteOutAllWires, emit_program, render_program,
                      select_clusters)
from .errors import (AmbiguousPinName, DepthExceeded, DuplicateReference,
                     DuplicateSymbolName, EmptyInput, InvalidToken,
                     MissingField, NoSuchPin, NotALibrary, NotASchematic,
                     PairingError, ProgramSyntaxError, SchcodeError,
                     SExprError, UnbalancedParen, UnresolvedLibId,
                     UnterminatedString, ZeroPassRatio)
from .geometry import GRID, Point, Rect, snap, snap_point, transform_offset
from .interp import Diagnostics, ExecError, parse_program, run_program
from .metrics import (COMPRESSOR_LEVEL, COMPRESSOR_NAME, ErcReport,
                      EvalReport, NetlistScore, erc_check, evaluate_batch,
                      lz_complexity, lz_norm, mdl_bits_per_byte,
                      netlist_compare, spatial_violations, valid_circuit,
                      weighted_overlaps)
from .model import (Junction, LabelInstance, Schematic, SymbolInstance,
                    WireSegment, item_bbox, read_schematic, write_schematic)
from .netgraph import (ConnectivityGraph, Net, Netlist, PinNode,
                       build_connectivity_graph, connected_pin_pairs,
                       extract_netlist, netlist_to_json)
from .sexpr import Atom, SList, parse_sexpr, write_sexpr
from .symbols import (PinDef, SymbolDef, SymbolLibrary, load_library_dirs,
                      load_symbol_library, pin_world_location, resolve_pin)

__version__ = "0.1.0"

__all__ = [
    "AddLabel", "AddNewWire", "AddSymbol", "AmbiguousPinName", "AnchorRef",
    "Atom", "COMPRESSOR_LEVEL", "COMPRESSOR_NAME", "ConnectPins",
    "ConnectivityGraph", "DepthExceeded", "Diagnostics",
    "DuplicateReference", "DuplicateSymbolName", "EmptyInput", "ErcReport",
    "EvalReport", "ExecError", "GRID", "InvalidToken", "Junction",
    "LabelInstance", "Literal", "MissingField", "Net", "Netlist",
    "NetlistScore", "NoSuchPin", "NotALibrary", "NotASchematic",
    "PairingError", "PinAnchor", "PinDef", "PinNode", "Point", "Program",
    "ProgramSyntaxError", "Rect", "SExprError", "SList", "SchcodeError",
    "Schematic", "SetAnchor", "SymbolDef", "SymbolInstance",
    "SymbolLibrary", "UnbalancedParen", "UnresolvedLibId",
    "UnterminatedString", "WireSegment", "WriteOutAllWires",
    "ZeroPassRatio", "build_connectivity_graph", "connected_pin_pairs",
    "emit_program", "erc_check", "evaluate_batch", "extract_netlist",
    "item_bbox", "load_library_dirs", "load_symbol_library",
    "lz_complexity", "lz_norm", "mdl_bits_per_byte", "netlist_compare",
    "netlist_to_json", "parse_program", "parse_sexpr", "pin_world_location",
    "read_schematic", "render_program", "resolve_pin", "run_program",
    "select_clusters", "snap", "snap_point", "spatial_violations",
    "transform_offset", "valid_circuit", "weighted_overlaps",
    "write_schematic", "write_sexpr",
]
