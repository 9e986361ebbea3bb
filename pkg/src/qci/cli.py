"""``qci`` command line: ``estimate``, ``min-n`` and ``simulate``."""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError, InputFileError, QCIError
from .estimators import DEFAULT_BOOTSTRAP_SAMPLES
from .intervals import Method, MetricBounds, asymptotic_ci_min_n, exact_ci_min_n
from .io import (
    BIAS_COLUMNS,
    COVERAGE_COLUMNS,
    LENGTH_COLUMNS,
    REPORT_COLUMNS,
    bias_rows,
    coverage_rows,
    csv_text,
    dumps_json,
    length_rows,
    load_study_config,
    read_run_records,
    report_rows,
    write_text,
)
from .rng import DEFAULT_SEED
from .study import QuantileRequest, analyze_sample, bias_study, coverage_study

METHOD_NAMES = {
    "exact": Method.EXACT_RANDOMIZED,
    "exact-randomized": Method.EXACT_RANDOMIZED,
    "exact-equal-tailed": Method.EXACT_EQUAL_TAILED,
    "asymptotic": Method.ASYMPTOTIC,
    "bootstrap": Method.BOOTSTRAP,
    "t-mean": Method.T_MEAN,
}
DEFAULT_METHODS = "exact,asymptotic,bootstrap,t-mean"

EXACT_GRID = ((0.90, 0.95, 0.99), (0.01, 0.025, 0.05, 0.1, 0.25, 0.5))
ASYMPTOTIC_GRID = ((0.90, 0.95, 0.99), (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99))

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2


def _float_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _method_list(text: str) -> list[Method]:
    out = []
    for name in (t.strip() for t in text.split(",")):
        if name not in METHOD_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown method {name!r}; choose from {', '.join(METHOD_NAMES)}"
            )
        out.append(METHOD_NAMES[name])
    return out


def _bounds(text: str) -> MetricBounds:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI (either side may be empty), got {text!r}")
    try:
        lo, hi = (float(p) if p.strip() else None for p in parts)
        return MetricBounds(lo, hi)
    except (ValueError, QCIError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qci",
        description="Quantile point estimates and confidence intervals from small samples.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="analyze one column of a CSV file")
    est.add_argument("--input", required=True, type=Path, help="CSV file with a header row")
    est.add_argument("--column", required=True, help="name of the numeric column to analyze")
    est.add_argument("--quantiles", type=_float_list, default=[0.5], help="quantile levels, e.g. 0.1,0.5,0.9")
    est.add_argument("--levels", type=_float_list, default=[0.90], help="confidence levels (default 0.90)")
    est.add_argument("--methods", type=_method_list, default=_method_list(DEFAULT_METHODS),
                     help=f"interval methods (default {DEFAULT_METHODS}); also exact-equal-tailed")
    est.add_argument("--bootstrap-samples", type=_positive_int, default=DEFAULT_BOOTSTRAP_SAMPLES)
    est.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    est.add_argument("--bounds", type=_bounds, default=None,
                     help="natural metric range LO,HI used to clamp bootstrap intervals")
    est.add_argument("--format", choices=("json", "csv"), default="json")
    est.add_argument("--output", type=Path, default=None, help="output file (default stdout)")

    mn = sub.add_parser("min-n", help="minimum sample size for an interval to exist")
    mn.add_argument("--method", choices=("exact", "asymptotic"), required=True)
    mn.add_argument("--quantile", type=float, help="quantile level")
    mn.add_argument("--level", type=float, help="confidence level")
    mn.add_argument("--grid", action="store_true", help="print the standard grid of levels")
    mn.add_argument("--format", choices=("text", "csv", "json"), default="text")

    sim = sub.add_parser("simulate", help="Monte Carlo coverage, length and bias study")
    sim.add_argument("--config", required=True, type=Path, help="JSON study configuration")
    sim.add_argument("--out", required=True, type=Path, help="output directory")
    sim.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    sim.add_argument("--no-bias", action="store_true", help="skip the point-estimator bias study")
    return parser


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        write_text(output, text)


def cmd_estimate(args) -> int:
    sample = read_run_records(args.input, args.column)
    requests = [
        QuantileRequest(u, level, tuple(args.methods), args.bounds)
        for u, level in itertools.product(args.quantiles, args.levels)
    ]
    report = analyze_sample(sample, requests, seed=args.seed, bootstrap_samples=args.bootstrap_samples)
    if args.format == "csv":
        _emit(csv_text(REPORT_COLUMNS, report_rows(report)), args.output)
        return EXIT_OK
    document = {
        "command": "estimate",
        "config": {
            "input": str(args.input),
            "column": args.column,
            "quantiles": args.quantiles,
            "levels": args.levels,
            "methods": [m.value for m in args.methods],
            "bootstrap_samples": args.bootstrap_samples,
            "seed": args.seed,
            "bounds": None if args.bounds is None else [args.bounds.lower, args.bounds.upper],
        },
        "report": report,
    }
    _emit(dumps_json(document), args.output)
    return EXIT_OK


def cmd_min_n(args, parser) -> int:
    fn = exact_ci_min_n if args.method == "exact" else asymptotic_ci_min_n
    if args.grid:
        levels, quantiles = EXACT_GRID if args.method == "exact" else ASYMPTOTIC_GRID
        if args.level is not None:
            levels = (args.level,)
        if args.quantile is not None:
            quantiles = (args.quantile,)
    elif args.quantile is None or args.level is None:
        parser.error("min-n needs --quantile and --level, or --grid")
    else:
        levels, quantiles = (args.level,), (args.quantile,)
    table = [[fn(u, level) for u in quantiles] for level in levels]

    if not args.grid:
        out = str(table[0][0]) + "\n"
    elif args.format == "json":
        out = dumps_json({
            "method": args.method,
            "quantile_levels": list(quantiles),
            "rows": [{"confidence_level": lv, "min_n": row} for lv, row in zip(levels, table)],
        })
    elif args.format == "csv":
        rows = [dict(confidence_level=lv, **{f"{u:g}": v for u, v in zip(quantiles, row)})
                for lv, row in zip(levels, table)]
        out = csv_text(["confidence_level"] + [f"{u:g}" for u in quantiles], rows)
    else:
        head = ["level \\ u"] + [f"{u:g}" for u in quantiles]
        body = [[f"{lv:g}"] + [str(v) for v in row] for lv, row in zip(levels, table)]
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
        out = "".join(
            "  ".join(cell.rjust(w) for cell, w in zip(r, widths)) + "\n" for r in [head] + body
        )
    sys.stdout.write(out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_study_config(args.config)
    args.out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    coverage = coverage_study(cfg, jobs=args.jobs)
    write_text(args.out / "coverage.csv", csv_text(COVERAGE_COLUMNS, coverage_rows(coverage)))
    write_text(args.out / "length.csv", csv_text(LENGTH_COLUMNS, length_rows(coverage)))
    outputs = ["coverage.csv", "length.csv"]
    if not args.no_bias and cfg.estimators:
        bias = bias_study(cfg, jobs=args.jobs)
        write_text(args.out / "bias.csv", csv_text(BIAS_COLUMNS, bias_rows(bias)))
        outputs.append("bias.csv")
    manifest = {
        "command": "simulate",
        "version": __version__,
        "config_file": str(args.config),
        "config": cfg.to_dict(),
        "master_seed": cfg.master_seed,
        "jobs": args.jobs,
        "outputs": outputs,
        "coverage_rows": len(coverage),
        "skipped_cells": sum(r.skipped_reason is not None for r in coverage),
        "wall_time_seconds": round(time.perf_counter() - started, 3),
    }
    write_text(args.out / "manifest.json", dumps_json(manifest))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "estimate":
            return cmd_estimate(args)
        if args.command == "min-n":
            return cmd_min_n(args, parser)
        return cmd_simulate(args)
    except (ConfigError, InputFileError) as exc:
        print(f"qci {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QCIError as exc:
        print(f"qci {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
