"""Evaluation metrics: ERC-lite validity, spatial violations, netlist
similarity, and code-complexity measures (MDL bits/byte and normalized
LZ76).
"""

from __future__ import annotations

import json
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple

from scipy.optimize import linear_sum_assignment

from .errors import EmptyInput, PairingError, ZeroPassRatio
from .geometry import (Rect, collinear_overlap_length, points_coincide,
                       segment_length_inside_rect)
from .model import Schematic, item_bbox
from .netgraph import (Net, Netlist, build_connectivity_graph,
                       extract_netlist)
from .symbols import SymbolLibrary, pin_world_location

COMPRESSOR_NAME = "deflate-raw"
COMPRESSOR_LEVEL = 9
_EPS = 1e-9
_ATTACH_RADIUS = 2.54 + 1e-6


# ---------------------------------------------------------------------------
# ERC


@dataclass
class ErcReport:
    criticals: List[dict] = field(default_factory=list)
    warnings: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.criticals

    def to_json(self) -> dict:
        return {"criticals": self.criticals, "warnings": self.warnings}


def erc_check(sch: Schematic, netlist: Netlist,
              library: Optional[SymbolLibrary] = None) -> ErcReport:
    """Electrical rules, reduced to the checks that matter for generated
    schematics: driver conflicts, power shorts, misused no-connect pins,
    undriven inputs/power, and single-pin nets."""
    lib = sch.library(library)
    pin_types: Dict[Tuple[str, str], str] = {}
    for inst in sch.symbols:
        try:
            definition = lib.get(inst.lib_id)
        except Exception:
            continue
        for pin in definition.pins:
            pin_types[(inst.reference, pin.id)] = pin.electrical_type

    report = ErcReport()
    for conflict in netlist.conflicts:
        names = sorted(conflict.names)
        report.criticals.append({
            "code": "PowerShort",
            "message": "power nets shorted: " + ", ".join(names),
            "net": names[0],
        })

    for net in netlist.nets:
        types = [pin_types.get((n.reference, n.pin), "passive")
                 for n in net.sorted_nodes()]
        n_out = types.count("output")
        n_pout = types.count("power_out")
        has_flag = bool(net.power_names)
        drivers = n_out + n_pout + (1 if has_flag else 0)

        if n_out + n_pout >= 2:
            report.criticals.append({
                "code": "DriverConflict",
                "message": f"net {net.name}: {n_out} output and {n_pout} "
                           f"power-output pins tied together",
                "net": net.name,
            })
        if "no_connect" in types and len(net.nodes) >= 2:
            report.criticals.append({
                "code": "NoConnectConnected",
                "message": f"net {net.name}: a no-connect pin is wired to "
                           f"other nodes",
                "net": net.name,
            })
        if len(net.nodes) == 1 and not has_flag:
            report.warnings.append({
                "code": "SinglePinNet",
                "message": f"net {net.name} has a single pin",
                "net": net.name,
            })
        if types and all(t == "input" for t in types) and not has_flag:
            report.warnings.append({
                "code": "InputOnly",
                "message": f"net {net.name} connects only input pins",
                "net": net.name,
            })
        if "power_in" in types and drivers == 0:
            report.warnings.append({
                "code": "PowerInNoDriver",
                "message": f"net {net.name} has power-input pins but no "
                           f"driver",
                "net": net.name,
            })
    return report


def valid_circuit(diagnostics, erc: ErcReport) -> bool:
    """Pass iff interpretation raised no errors and ERC found no criticals."""
    return bool(diagnostics.ok and erc.ok)


# ---------------------------------------------------------------------------
# Spatial violations


def spatial_violations(sch: Schematic,
                       library: Optional[SymbolLibrary] = None) -> int:
    """Count overlapping item pairs: symbol/symbol and symbol/label bbox
    interiors, wire runs through foreign symbol boxes, and collinear
    wire/wire overlap. Attached wires and labels are exempt."""
    lib = sch.library(library)
    symbol_boxes: List[Tuple[object, Rect, list]] = []
    for inst in sch.symbols:
        box = item_bbox(inst, lib)
        try:
            definition = lib.get(inst.lib_id)
            pins = [pin_world_location(inst, pin) for pin in definition.pins]
        except Exception:
            pins = []
        symbol_boxes.append((inst, box, pins))

    label_boxes = [(label, item_bbox(label, lib)) for label in sch.labels]
    violations = 0

    for i in range(len(symbol_boxes)):
        for j in range(i + 1, len(symbol_boxes)):
            if symbol_boxes[i][1].overlap_area(symbol_boxes[j][1]) > _EPS:
                violations += 1

    for _, box, pins in symbol_boxes:
        for wire in sch.wires:
            if any(points_coincide(end, pin)
                   for end in (wire.a, wire.b) for pin in pins):
                continue
            if segment_length_inside_rect(wire.a, wire.b, box) > _EPS:
                violations += 1

    for inst, box, pins in symbol_boxes:
        for label, lbox in label_boxes:
            attached = any(
                math.hypot(label.position.x - pin.x,
                           label.position.y - pin.y) <= _ATTACH_RADIUS
                for pin in pins)
            if attached:
                continue
            if box.overlap_area(lbox) > _EPS:
                violations += 1

    for i in range(len(sch.wires)):
        for j in range(i + 1, len(sch.wires)):
            a, b = sch.wires[i], sch.wires[j]
            if collinear_overlap_length(a.a, a.b, b.a, b.b) > _EPS:
                violations += 1

    return violations


def weighted_overlaps(mean_overlaps: float, pass_ratio: float) -> float:
    """Penalize overlap counts by the failure rate: mean / pass_ratio."""
    if pass_ratio <= 0.0:
        raise ZeroPassRatio("pass ratio is zero; weighted overlaps undefined")
    return mean_overlaps / pass_ratio


# ---------------------------------------------------------------------------
# Netlist comparison


class NetlistScore(NamedTuple):
    jaccard: float
    precision: float
    recall: float

    def to_json(self) -> dict:
        return {"jaccard": self.jaccard, "precision": self.precision,
                "recall": self.recall}


def _node_sets(netlist: Netlist, canonicalize: bool) -> List[frozenset]:
    rename = _canonical_names(netlist) if canonicalize else None
    sets = []
    for net in netlist.nets:
        nodes = set()
        for node in net.nodes:
            reference = rename[node.reference] if rename \
                else node.reference
            nodes.add(f"{reference}.{node.pin}")
        sets.append(frozenset(nodes))
    return sets


def _canonical_names(netlist: Netlist) -> Dict[str, str]:
    """Reference-free renaming: identical parts are distinguished only by
    their connectivity fingerprint, so schematics that differ in reference
    numbering compare equal."""
    info = netlist.symbols
    net_of_node: Dict[Tuple[str, str], int] = {}
    for idx, net in enumerate(netlist.nets):
        for node in net.nodes:
            net_of_node[(node.reference, node.pin)] = idx

    def net_signature(net: Net) -> tuple:
        members = sorted(
            "|".join((*info.get(n.reference, ("?", "?")), n.pin))
            for n in net.nodes)
        names = (tuple(sorted(net.power_names)),
                 tuple(sorted(net.label_texts)))
        return (names, len(net.nodes), tuple(members))

    signatures = {idx: net_signature(net)
                  for idx, net in enumerate(netlist.nets)}

    def fingerprint(reference: str) -> tuple:
        joined = []
        for (ref, pin), idx in net_of_node.items():
            if ref == reference:
                joined.append((pin, signatures[idx]))
        return tuple(sorted(joined))

    groups: Dict[Tuple[str, str], List[str]] = {}
    for reference, (lib_id, value) in info.items():
        groups.setdefault((lib_id, value), []).append(reference)

    rename: Dict[str, str] = {}
    for (lib_id, value), refs in groups.items():
        refs.sort(key=lambda r: (fingerprint(r), r))
        for ordinal, reference in enumerate(refs, start=1):
            rename[reference] = f"{lib_id}|{value}|{ordinal}"
    return rename


def netlist_compare(generated: Netlist, truth: Netlist, mode: str = "exact",
                    canonicalize: bool = True) -> NetlistScore:
    """Set-of-node-sets similarity between two netlists.

    exact: count multiset-equal nets. partial: optimal one-to-one net
    assignment maximizing per-net node Jaccard (scipy Hungarian). Net
    names are never scored.
    """
    if mode not in ("exact", "partial"):
        raise ValueError(f"unknown mode {mode!r}")
    gen = _node_sets(generated, canonicalize)
    ref = _node_sets(truth, canonicalize)
    if not gen and not ref:
        return NetlistScore(1.0, 1.0, 1.0)
    if not gen or not ref:
        return NetlistScore(0.0, 0.0, 0.0)

    if mode == "exact":
        remaining = list(ref)
        matched = 0.0
        for net in gen:
            if net in remaining:
                remaining.remove(net)
                matched += 1.0
    else:
        weights = [[_jaccard(a, b) for b in ref] for a in gen]
        rows, cols = linear_sum_assignment(weights, maximize=True)
        matched = float(sum(weights[r][c] for r, c in zip(rows, cols)))

    precision = matched / len(gen)
    recall = matched / len(ref)
    union = len(gen) + len(ref) - matched
    jaccard = matched / union if union > 0 else 1.0
    return NetlistScore(jaccard, precision, recall)


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


# ---------------------------------------------------------------------------
# Code complexity


def _as_bytes(data) -> bytes:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if not isinstance(data, (bytes, bytearray)):
        raise TypeError("expected str or bytes")
    if len(data) == 0:
        raise EmptyInput("cannot measure an empty input")
    return bytes(data)


def mdl_bits_per_byte(data) -> float:
    """Description length under raw DEFLATE (level 9), in bits per input
    byte."""
    raw = _as_bytes(data)
    compressor = zlib.compressobj(COMPRESSOR_LEVEL, zlib.DEFLATED, -15)
    compressed = compressor.compress(raw) + compressor.flush()
    return 8.0 * len(compressed) / len(raw)


def lz_complexity(data) -> int:
    """LZ76 phrase count with strict history: each phrase is the shortest
    prefix of the remainder that does not occur inside the already-parsed
    prefix; a final still-matching fragment counts as one phrase."""
    raw = _as_bytes(data)
    n = len(raw)
    count = 0
    i = 0
    while i < n:
        remainder = n - i
        if i == 0:
            count += 1
            i += 1
            continue
        lo, hi = 1, remainder
        shortest = None
        while lo <= hi:
            mid = (lo + hi) // 2
            if raw.find(raw[i:i + mid], 0, i) == -1:
                shortest = mid
                hi = mid - 1
            else:
                lo = mid + 1
        count += 1
        if shortest is None:
            break  # remainder exhausted while still matching history
        i += shortest
    return count


def lz_norm(data) -> float:
    """Normalized LZ76 complexity: c(x) * log2(n) / n."""
    raw = _as_bytes(data)
    n = len(raw)
    if n == 1:
        return 0.0
    return lz_complexity(raw) * math.log2(n) / n


# ---------------------------------------------------------------------------
# Batch evaluation


@dataclass
class DesignResult:
    name: str
    level: str
    passed: bool
    errors: List[dict]
    erc_criticals: int
    overlaps: Optional[int]
    netlist: Optional[NetlistScore]
    mdl: float
    lz: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "level": self.level,
            "pass": self.passed,
            "errors": self.errors,
            "erc_criticals": self.erc_criticals,
            "overlaps": self.overlaps,
            "netlist": self.netlist.to_json() if self.netlist else None,
            "mdl": self.mdl,
            "lz_norm": self.lz,
        }


@dataclass
class EvalReport:
    pass_ratio: float
    mean_overlaps: Optional[float]
    weighted: Optional[float]
    netlist: Optional[NetlistScore]
    per_design: List[DesignResult]

    def to_json(self) -> dict:
        return {
            "pass_ratio": self.pass_ratio,
            "mean_overlaps": self.mean_overlaps,
            "weighted_overlaps": self.weighted,
            "netlist": self.netlist.to_json() if self.netlist else None,
            "compressor": {"name": COMPRESSOR_NAME,
                           "level": COMPRESSOR_LEVEL},
            "per_design": [d.to_json() for d in self.per_design],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _evaluate_one(name: str, program_text: str, truth: Schematic,
                  library: SymbolLibrary) -> DesignResult:
    from . import interp

    mdl = mdl_bits_per_byte(program_text)
    lz = lz_norm(program_text)
    try:
        program = interp.parse_program(program_text)
    except Exception as exc:
        return DesignResult(name, "?", False,
                            [{"code": "SyntaxError", "message": str(exc),
                              "line": getattr(exc, "line", 0)}],
                            0, None, None, mdl, lz)
    schematic, diagnostics = interp.run_program(program, library)
    errors = [e.to_json() for e in diagnostics.errors]
    if schematic is None:
        return DesignResult(name, program.level, False, errors, 0, None,
                            None, mdl, lz)

    graph = build_connectivity_graph(schematic, library)
    netlist = extract_netlist(graph, schematic)
    erc = erc_check(schematic, netlist, library)
    passed = valid_circuit(diagnostics, erc)
    if not passed:
        return DesignResult(name, program.level, False, errors,
                            len(erc.criticals), None, None, mdl, lz)

    overlaps = spatial_violations(schematic, library)
    truth_graph = build_connectivity_graph(truth, library)
    truth_netlist = extract_netlist(truth_graph, truth)
    score = netlist_compare(netlist, truth_netlist, mode="partial",
                            canonicalize=True)
    return DesignResult(name, program.level, True, errors,
                        0, overlaps, score, mdl, lz)


def evaluate_batch(pred_dir, gt_dir, library: SymbolLibrary,
                   workers: Optional[int] = None) -> EvalReport:
    """Score every prediction in pred_dir against gt_dir/<stem>.kicad_sch.

    A design passes when interpretation produced no errors and ERC found
    no criticals; overlap and netlist scores aggregate over passers only.
    """
    from .model import read_schematic
    from .sexpr import parse_sexpr

    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    predictions = sorted(pred_dir.glob("*.schcode"))
    if not predictions:
        raise PairingError(str(pred_dir))

    jobs = []
    for pred in predictions:
        truth_path = gt_dir / (pred.stem + ".kicad_sch")
        if not truth_path.exists():
            raise PairingError(pred.stem)
        jobs.append((pred, truth_path))

    def work(job) -> DesignResult:
        pred, truth_path = job
        truth = read_schematic(parse_sexpr(truth_path.read_text()))
        return _evaluate_one(pred.stem, pred.read_text(), truth, library)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(work, jobs))
    results.sort(key=lambda r: r.name)

    passers = [r for r in results if r.passed]
    pass_ratio = len(passers) / len(results)
    mean_overlaps = (sum(r.overlaps for r in passers) / len(passers)
                     if passers else None)
    weighted = (weighted_overlaps(mean_overlaps, pass_ratio)
                if passers else None)
    netlist = None
    if passers:
        netlist = NetlistScore(
            jaccard=sum(r.netlist.jaccard for r in passers) / len(passers),
            precision=sum(r.netlist.precision for r in passers)
            / len(passers),
            recall=sum(r.netlist.recall for r in passers) / len(passers),
        )
    return EvalReport(pass_ratio=pass_ratio, mean_overlaps=mean_overlaps,
                      weighted=weighted, netlist=netlist,
                      per_design=results)
