"""Command line interface.

Subcommands:

* ``fuse``      -- fuse study triplet files into a ranked result table
* ``calibrate`` -- calibrate study p-values and fuse them the same way
* ``simulate``  -- run one simulation scenario over a parameter grid
* ``bh``        -- run plain BH on a flat p-value list
* ``report``    -- render figures from a simulation summary table

Exit codes are a stable scripting contract: 0 success, 1 I/O failure,
2 validation or usage error (diagnostics on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io, sim
from .aggregate import AGG, AGG_STAR, aggregate_evidence, coverage
from .calibrate import calibrated_vectors
from .core import validate_problem
from .evidence import build_evidence
from .io import ParseError
from .mtp import bh, ebh
from .plots import render_summary

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2

_MODE_FLAGS = {"agg": AGG, "agg-star": AGG_STAR}


def _parse_m(text: str):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--m must be a positive integer or 'auto'")
    if value < 1:
        raise argparse.ArgumentTypeError("--m must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decisionfuse",
        description="Fuse binary decision sequences from multiple studies "
                    "with overall FDR control.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fuse = sub.add_parser("fuse", help="fuse study triplet files")
    fuse.add_argument("--inputs", nargs="+", required=True, metavar="FILE")
    fuse.add_argument("--m", type=_parse_m, default="auto")
    fuse.add_argument("--alpha", type=float, required=True)
    fuse.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="agg")
    fuse.add_argument("--output", required=True)

    cal = sub.add_parser("calibrate", help="calibrate p-values and fuse")
    cal.add_argument("--pvalues", required=True, metavar="FILE")
    cal.add_argument("--m", type=_parse_m, default="auto")
    cal.add_argument("--alpha", type=float, required=True)
    cal.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="agg")
    cal.add_argument("--output", required=True)

    simulate = sub.add_parser("simulate", help="run a simulation scenario")
    simulate.add_argument("--scenario", type=int, required=True, choices=range(1, 7))
    simulate.add_argument("--reps", type=int, default=500)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--grid", required=True, metavar="KEY=V1,V2,...")
    simulate.add_argument("--methods", default=None,
                          help="comma-separated subset of "
                               + ",".join(sim.ALL_METHODS))
    simulate.add_argument("--alpha", type=float, default=None,
                          help="override the scenario's overall FDR level")
    simulate.add_argument("--output", required=True,
                          help="long-format table path; the summary goes to "
                               "<output>.summary.csv")

    bh_cmd = sub.add_parser("bh", help="BH on a flat p-value list")
    bh_cmd.add_argument("--pvalues", required=True, metavar="FILE",
                        help="JSON array of p-values")
    bh_cmd.add_argument("--alpha", type=float, required=True)

    report = sub.add_parser("report", help="render figures from a summary table")
    report.add_argument("--summary", required=True, metavar="FILE")
    report.add_argument("--output-dir", required=True)
    report.add_argument("--grid-label", default="grid value")

    return parser


def _fail_validation(message: str) -> int:
    print(message, file=sys.stderr)
    return EXIT_VALIDATION


def _report_diagnostics(diagnostics) -> bool:
    """Print diagnostics to stderr; True when any is an error."""
    has_error = False
    for diag in diagnostics:
        where = f" [{diag.study_id}]" if diag.study_id else ""
        print(f"{diag.level}{where} {diag.field}: {diag.message}", file=sys.stderr)
        has_error = has_error or diag.is_error
    return has_error


def cmd_fuse(args) -> int:
    records = [io.read_study_record(path) for path in args.inputs]
    problem, label_map = io.build_problem(records, args.m, args.alpha)
    if _report_diagnostics(validate_problem(problem)):
        return EXIT_VALIDATION
    mode = _MODE_FLAGS[args.mode]
    cov = coverage(problem.studies, problem.m)
    agg = aggregate_evidence([build_evidence(s) for s in problem.studies], cov, mode)
    rejection = ebh(agg.values, args.alpha)
    io.write_result_table(args.output, label_map, cov.counts, agg.values,
                          rejection, mode, args.alpha)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    records = io.read_pvalue_records(args.pvalues)
    if not records:
        return _fail_validation("no study records in p-value file")
    if not (0.0 < args.alpha < 1.0):
        return _fail_validation(f"alpha out of range (0, 1): {args.alpha}")
    table, label_map = io.build_pvalue_table(records, args.m)
    mode = _MODE_FLAGS[args.mode]
    cov = _pvalue_coverage(table, label_map.m)
    agg = aggregate_evidence(calibrated_vectors(table), cov, mode)
    rejection = ebh(agg.values, args.alpha)
    io.write_result_table(args.output, label_map, cov.counts, agg.values,
                          rejection, mode, args.alpha, value_column="e_p2e")
    return EXIT_OK


def _pvalue_coverage(table, m):
    counts = np.zeros(m, dtype=np.int64)
    for s in table.studies:
        np.add.at(counts, s.ids, 1)
    counts.setflags(write=False)
    from .aggregate import CoverageProfile
    return CoverageProfile(counts=counts, n=int(counts.max()) if m else 0)


def _parse_grid(text: str, scenario: int):
    if "=" not in text:
        raise ParseError("--grid must look like key=v1,v2,...")
    key, _, values = text.partition("=")
    expected = sim.GRID_KEYS[scenario]
    if key != expected:
        raise ParseError(f"scenario {scenario} sweeps {expected!r}, not {key!r}")
    parsed = []
    for chunk in values.split(","):
        if expected in ("d", "K"):
            parsed.append(int(chunk))
        else:
            parsed.append(float(chunk))
    if not parsed:
        raise ParseError("--grid needs at least one value")
    return key, parsed


def cmd_simulate(args) -> int:
    key, grid = _parse_grid(args.grid, args.scenario)
    overrides: dict = {"reps": args.reps, "seed": args.seed}
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.methods:
        overrides["methods"] = tuple(args.methods.split(","))
    # Scenario 4 needs a K before validation; the grid fills it per point.
    if args.scenario == 4:
        overrides["k_signal"] = grid[0]
    if args.scenario == 2:
        overrides["rho"] = grid[0]
    if args.scenario in (5, 6):
        overrides["eta"] = grid[0]

    base = sim.scenario_config(args.scenario, **overrides)
    long_rows: list[tuple] = []
    summary_rows: list[tuple] = []
    for value in grid:
        config = sim.apply_grid_value(base, value)
        result = sim.run_scenario(config)
        for row in result.metrics:
            long_rows.append((value, row.method, row.rep, row.fdp, row.etp))
        for srow in result.summary:
            summary_rows.append((value, srow.method, srow.mean_fdp,
                                 srow.mean_etp, srow.se_fdp, srow.se_etp))

    io.write_long_table(args.output, long_rows)
    io.write_summary_table(args.output + ".summary.csv", summary_rows)
    return EXIT_OK


def cmd_bh(args) -> int:
    with open(args.pvalues, "r") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.pvalues}: invalid JSON ({exc})") from exc
    if (not isinstance(payload, list) or not payload
            or not all(isinstance(p, (int, float)) for p in payload)):
        raise ParseError(f"{args.pvalues}: expected a non-empty JSON array of numbers")
    try:
        rejection = bh([float(p) for p in payload], args.alpha)
    except ValueError as exc:
        return _fail_validation(str(exc))
    for idx in rejection.rejected:
        print(int(idx) + 1)
    return EXIT_OK


def cmd_report(args) -> int:
    rows = io.read_summary_table(args.summary)
    if not rows:
        return _fail_validation(f"{args.summary}: empty summary table")
    for path in render_summary(rows, args.output_dir, grid_label=args.grid_label):
        print(path)
    return EXIT_OK


_COMMANDS = {
    "fuse": cmd_fuse,
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "bh": cmd_bh,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        return _fail_validation(str(exc))
    except ValueError as exc:
        return _fail_validation(str(exc))
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())
