"""Command-line interface.

Exit codes: 0 success, 2 parse error (s-expression or program syntax),
3 execution error, 4 pairing error in batch evaluation.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import codegen, interp, metrics
from .errors import PairingError, ProgramSyntaxError, SchcodeError, SExprError
from .model import read_schematic, write_schematic
from .netgraph import build_connectivity_graph, extract_netlist, \
    netlist_to_json
from .sexpr import parse_sexpr, write_sexpr
from .symbols import SymbolLibrary, load_library_dirs

EXIT_PARSE = 2
EXIT_EXEC = 3
EXIT_PAIRING = 4

LIBS_ENV = "SCHCODE_LIBS"


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise click.exceptions.Exit(_fail(EXIT_PARSE, str(exc)))


def _write_output(path: str, text: str) -> None:
    if path == "-" or not path:
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text)


def _load_libraries(libs) -> SymbolLibrary:
    paths = list(libs)
    if not paths and os.environ.get(LIBS_ENV):
        paths = os.environ[LIBS_ENV].split(os.pathsep)
    return load_library_dirs(paths)


def _read_schematic_file(path: str):
    try:
        return read_schematic(parse_sexpr(_read_input(path)))
    except SExprError as exc:
        raise click.exceptions.Exit(_fail(EXIT_PARSE, str(exc)))


def _schematic_from_any(path: str, library: SymbolLibrary):
    """Accept either a schematic file or a program ('-' means stdin,
    treated as a schematic unless it parses as a program)."""
    if path != "-" and path.endswith(".schcode"):
        return _run_program_file(path, library)
    return _read_schematic_file(path)


def _run_program_file(path: str, library: SymbolLibrary):
    text = _read_input(path)
    try:
        program = interp.parse_program(text)
    except ProgramSyntaxError as exc:
        raise click.exceptions.Exit(_fail(EXIT_PARSE, str(exc)))
    schematic, diagnostics = interp.run_program(program, library)
    if schematic is None:
        message = "; ".join(f"{e.code}: {e.message}"
                            for e in diagnostics.errors)
        raise click.exceptions.Exit(_fail(EXIT_EXEC, message))
    return schematic


def _fail(code: int, message: str) -> int:
    click.echo(f"error: {message}", err=True)
    return code


@click.group()
def main() -> None:
    """Schematic/code conversion and evaluation toolkit."""


@main.command("to-code")
@click.argument("schematic")
@click.option("--level",
              type=click.Choice(["L1", "L2", "L3"], case_sensitive=False),
              default="L2", show_default=True)
@click.option("--libs", multiple=True,
              help=f"Symbol library directory (or set ${LIBS_ENV}).")
@click.option("-o", "--output", default="-", show_default=True)
def to_code(schematic: str, level: str, libs, output: str) -> None:
    """Convert a schematic into a program at the given ablation level."""
    library = _load_libraries(libs)
    sch = _read_schematic_file(schematic)
    merged = sch.library(library)
    graph = build_connectivity_graph(sch, merged, include_name_edges=False)
    clusters = codegen.select_clusters(sch, graph)
    for i, cluster in enumerate(clusters, start=1):
        click.echo(f"cluster {i}: center {cluster.center.reference} "
                   f"({cluster.center.lib_id}), "
                   f"{len(cluster.symbols)} symbols", err=True)
    program = codegen.emit_program(sch, graph, level.upper())
    _write_output(output, codegen.render_program(program))


@main.command("run")
@click.argument("program")
@click.option("--libs", multiple=True)
@click.option("-o", "--output", default="-", show_default=True)
@click.option("--diagnostics", "diag_path", default=None,
              help="Also write run diagnostics JSON to this path.")
@click.option("--version-header", default="",
              help="Override the kicad_sch version header value.")
def run(program: str, libs, output: str, diag_path,
        version_header: str) -> None:
    """Interpret a program and write the resulting schematic."""
    library = _load_libraries(libs)
    text = _read_input(program)
    try:
        parsed = interp.parse_program(text)
    except ProgramSyntaxError as exc:
        raise click.exceptions.Exit(_fail(EXIT_PARSE, str(exc)))
    schematic, diagnostics = interp.run_program(parsed, library)
    if diag_path:
        Path(diag_path).write_text(
            json.dumps(diagnostics.to_json(), indent=2) + "\n")
    if schematic is None:
        message = "; ".join(f"{e.code}: {e.message}"
                            for e in diagnostics.errors)
        raise click.exceptions.Exit(_fail(EXIT_EXEC, message))
    _write_output(output,
                  write_sexpr(write_schematic(schematic, version_header))
                  + "\n")


@main.command("netlist")
@click.argument("input_path")
@click.option("--libs", multiple=True)
@click.option("-o", "--output", default="-", show_default=True)
def netlist_cmd(input_path: str, libs, output: str) -> None:
    """Extract the netlist of a schematic or program as JSON."""
    library = _load_libraries(libs)
    sch = _schematic_from_any(input_path, library)
    graph = build_connectivity_graph(sch, sch.library(library))
    netlist = extract_netlist(graph, sch)
    _write_output(output,
                  json.dumps(netlist_to_json(netlist), indent=2) + "\n")


@main.command("compare")
@click.argument("generated")
@click.argument("truth")
@click.option("--mode", type=click.Choice(["exact", "partial"]),
              default="exact", show_default=True)
@click.option("--canonicalize/--no-canonicalize", default=True,
              show_default=True)
@click.option("--libs", multiple=True)
def compare(generated: str, truth: str, mode: str, canonicalize: bool,
            libs) -> None:
    """Compare two designs' netlists (schematic or program inputs)."""
    library = _load_libraries(libs)

    def netlist_of(path: str):
        sch = _schematic_from_any(path, library)
        graph = build_connectivity_graph(sch, sch.library(library))
        return extract_netlist(graph, sch)

    score = metrics.netlist_compare(netlist_of(generated), netlist_of(truth),
                                    mode=mode, canonicalize=canonicalize)
    click.echo(json.dumps(score.to_json(), indent=2))


@main.command("erc")
@click.argument("input_path")
@click.option("--libs", multiple=True)
def erc(input_path: str, libs) -> None:
    """Run the reduced electrical rules check and print the report."""
    library = _load_libraries(libs)
    sch = _schematic_from_any(input_path, library)
    merged = sch.library(library)
    graph = build_connectivity_graph(sch, merged)
    netlist = extract_netlist(graph, sch)
    report = metrics.erc_check(sch, netlist, library)
    click.echo(json.dumps(report.to_json(), indent=2))


@main.command("overlaps")
@click.argument("input_path")
@click.option("--libs", multiple=True)
def overlaps(input_path: str, libs) -> None:
    """Count spatial violations in a schematic or program."""
    library = _load_libraries(libs)
    sch = _schematic_from_any(input_path, library)
    click.echo(str(metrics.spatial_violations(sch, library)))


@main.command("complexity")
@click.argument("input_path")
@click.option("--metric", type=click.Choice(["mdl", "lz"]), default=None,
              help="Print just this scalar instead of the full JSON.")
def complexity(input_path: str, metric) -> None:
    """Code-complexity measures of a text file ('-' reads stdin)."""
    text = _read_input(input_path)
    try:
        if metric == "mdl":
            click.echo(repr(metrics.mdl_bits_per_byte(text)))
            return
        if metric == "lz":
            click.echo(repr(metrics.lz_norm(text)))
            return
        result = {
            "bytes": len(text.encode("utf-8")),
            "mdl_bits_per_byte": metrics.mdl_bits_per_byte(text),
            "lz_phrases": metrics.lz_complexity(text),
            "lz_norm": metrics.lz_norm(text),
            "compressor": {"name": metrics.COMPRESSOR_NAME,
                           "level": metrics.COMPRESSOR_LEVEL},
        }
    except SchcodeError as exc:
        raise click.exceptions.Exit(_fail(EXIT_PARSE, str(exc)))
    click.echo(json.dumps(result, indent=2))


@main.command("eval")
@click.option("--pred", required=True,
              help="Directory of predicted *.schcode programs.")
@click.option("--gt", required=True,
              help="Directory of ground-truth *.kicad_sch schematics.")
@click.option("--libs", multiple=True)
@click.option("--workers", type=int, default=None)
@click.option("--output-format", type=click.Choice(["json", "table"]),
              default="json", show_default=True)
@click.option("-o", "--output", default="-", show_default=True)
def eval_cmd(pred: str, gt: str, libs, workers, output_format: str,
             output: str) -> None:
    """Evaluate a directory of programs against ground-truth schematics."""
    library = _load_libraries(libs)
    try:
        report = metrics.evaluate_batch(pred, gt, library, workers=workers)
    except PairingError as exc:
        raise click.exceptions.Exit(_fail(EXIT_PAIRING, str(exc)))
    if output_format == "table":
        _write_output(output, _report_table(report))
    else:
        _write_output(output, report.to_json_text())


def _report_table(report) -> str:
    data = report.to_json()

    def cell(value, fmt="{}"):
        return "-" if value is None else fmt.format(value)

    header = f'{"design":<32} {"level":<5} {"pass":<5} ' \
             f'{"overlaps":>8} {"jaccard":>8}'
    rows = [header, "-" * len(header)]
    for design in data["per_design"]:
        score = design["netlist"] or {}
        rows.append(f'{design["name"]:<32} {design["level"]:<5} '
                    f'{str(design["pass"]).lower():<5} '
                    f'{cell(design["overlaps"]):>8} '
                    f'{cell(score.get("jaccard"), "{:.3f}"):>8}')
    rows.append("-" * len(header))
    net = data["netlist"] or {}
    rows.append(f'pass_ratio {data["pass_ratio"]:.3f}   '
                f'mean_overlaps {cell(data["mean_overlaps"], "{:.3f}")}   '
                f'weighted_overlaps '
                f'{cell(data["weighted_overlaps"], "{:.4f}")}   '
                f'jaccard {cell(net.get("jaccard"), "{:.4f}")}')
    return "\n".join(rows) + "\n"


if __name__ == "__main__":
    main()
