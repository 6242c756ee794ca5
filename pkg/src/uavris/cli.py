"""Command-line driver: ``uavris {sweep,optimize,validate,presets}``."""

from __future__ import annotations

import argparse
import contextlib
import sys

from . import analytics as an
from .config import ScenarioError, load_scenario, parse_scenario_text
from .sweep import (FIGURES, MC_METRICS, OBJECTIVES, UsageError, csv_columns, optimize_n, run_sweep,
                    validate, write_csv, write_report)


def _scenario(args):
    text = ""
    if args.scenario:
        with open(args.scenario) as fh:
            text = fh.read()
    if args.set:
        text += "\n" + "\n".join(args.set)
    values = parse_scenario_text(text) if text else {}
    return load_scenario(preset="paper-default", **values)


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _split(text):
    return [s.strip() for s in text.split(",") if s.strip()] if text else []


def cmd_sweep(args):
    scenario = _scenario(args)
    grid, metrics, trials = args.grid, _split(args.metrics), args.trials
    if args.preset:
        if args.preset not in FIGURES:
            raise UsageError(f"unknown figure preset {args.preset!r}; see 'presets'")
        fig = FIGURES[args.preset]
        grid = grid or fig.grid
        metrics = metrics or list(fig.metrics)
        trials = fig.trials if trials is None else trials
    if not grid:
        raise UsageError("--grid or --preset is required")
    if not metrics:
        raise UsageError("no metrics requested (--metrics)")
    trials = trials or 0
    mc_metrics = _split(args.mc_metrics) if args.mc_metrics else None
    records = run_sweep(scenario, grid, metrics, trials=trials, seed=args.seed,
                        mc_metrics=mc_metrics, method=args.method,
                        combinatorial=args.combinatorial, workers=args.workers)
    if mc_metrics is None:
        mc_metrics = [m for m in metrics if m in MC_METRICS]
    with _output(args.out) as fh:
        write_csv(records, metrics, mc_metrics if trials > 0 else (), fh)


def cmd_optimize(args):
    scenario = _scenario(args)
    n_range = None
    if args.n_range:
        lo, hi = args.n_range.split(":")
        n_range = (int(lo), int(hi))
    res = optimize_n(scenario, n_range, args.objective, args.method, args.combinatorial)
    print(f"n_star={res.n_star} {args.objective}={res.value:.9g}", file=sys.stderr)
    with _output(args.out) as fh:
        fh.write(f"N,{args.objective}\n")
        for n, v in res.curve:
            fh.write(f"{n},{'' if v != v else format(v, '.9g')}\n")


def cmd_validate(args):
    scenario = _scenario(args)
    rows = validate(scenario, args.grid, L=args.L, trials=args.trials, seed=args.seed)
    with _output(args.out) as fh:
        write_report(rows, fh)


def cmd_presets(args):
    for fig in FIGURES.values():
        mc = [m for m in fig.metrics if m in MC_METRICS] if fig.trials else ()
        cols = ",".join(csv_columns(fig.metrics, mc))
        print(f"{fig.name}\t{fig.description}\n\tgrid: {fig.grid}\n\tcolumns: {cols}"
              f"\n\tdefault trials: {fig.trials}")


def build_parser():
    parser = argparse.ArgumentParser(prog="uavris", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="key = value scenario file (default: paper-default)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one scenario field; repeatable")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv"], default="csv")
    common.add_argument("--method", choices=an.METHODS, default=an.NUMERIC,
                        help="per-round success evaluation")
    common.add_argument("--combinatorial", action="store_true",
                        help="weight collision interleavings by their binomial count")

    p = sub.add_parser("sweep", parents=[common], help="evaluate metrics over a grid")
    p.add_argument("--preset", help="figure preset (see 'presets')")
    p.add_argument("--grid", help="axis=start:stop:step or axis=v1|v2, comma separated")
    p.add_argument("--metrics", help="comma-separated metrics")
    p.add_argument("--mc-metrics", help="subset of metrics to simulate (default: all simulable)")
    p.add_argument("--trials", type=int, default=None, help="Monte-Carlo trials per point")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("optimize", parents=[common], help="search the best RIS size")
    p.add_argument("--n-range", help="lo:hi (inclusive)")
    p.add_argument("--objective", choices=OBJECTIVES, default="d_bar_f")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("validate", parents=[common], help="analytic vs simulation report")
    p.add_argument("--grid", help="N and d2 values (default: N=300|400|500,d2=200|250|300)")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--L", type=int, default=3)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("presets", help="list figure presets")
    p.set_defaults(fn=cmd_presets)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except (UsageError, ScenarioError) as exc:
        parser.exit(2, f"uavris: error: {exc}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
