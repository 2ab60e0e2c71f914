"""Command-line front end: run / sweep / aggregate / export.

Exit codes: 0 on success, 2 for configuration or validation problems,
1 for runtime failures.  The library API in ``experiments`` does the work;
this module only parses flags and applies overrides.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import os
import sys

from .env import ConfigError
from .experiments import (
    ExperimentConfig,
    aggregate,
    export_plot_data,
    metrics_filename,
    parse_config,
    run_point,
    run_sweep,
    write_metrics,
    write_summary,
    _point_meta,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _load_config(args) -> ExperimentConfig:
    config = parse_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "episodes", None) is not None:
        config = dataclasses.replace(
            config, train=dataclasses.replace(config.train, episodes=args.episodes)
        )
    if getattr(args, "algo", None):
        config = dataclasses.replace(config, algorithms=(args.algo,))
    if getattr(args, "seed", None) is not None:
        config = dataclasses.replace(config, seeds=(args.seed,))
    if getattr(args, "out", None):
        config = dataclasses.replace(config, output_dir=args.out)
    return config


def _cmd_run(args) -> int:
    config = _load_config(args)
    gap = config.env.intra_platoon_gap_m
    size = config.env.platoon_size
    algorithm = config.algorithms[0]
    seed = config.seeds[0]
    log = run_point(config, gap, size, algorithm, seed)
    os.makedirs(config.output_dir, exist_ok=True)
    path = os.path.join(config.output_dir, metrics_filename(gap, size, algorithm, seed))
    write_metrics(path, log, _point_meta(config, gap, size, algorithm, seed))
    print(path)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    paths = run_sweep(config, parallel_runs=args.parallel, skip_existing=not args.rerun)
    for path in paths:
        print(path)
    return EXIT_OK


def _metric_paths(args) -> list[str]:
    if args.metrics:
        return args.metrics
    pattern = os.path.join(args.out or "runs", "metrics_*.csv")
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise FileNotFoundError(f"no metrics files match {pattern}")
    return paths


def _cmd_aggregate(args) -> int:
    summary = aggregate(_metric_paths(args), tail_window=args.tail_window)
    out_dir = args.out or "runs"
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "summary.csv")
    write_summary(path, summary)
    print(path)
    return EXIT_OK


def _cmd_export(args) -> int:
    summary = aggregate(_metric_paths(args), tail_window=args.tail_window)
    for path in export_plot_data(summary, args.out or "runs"):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platoonrl",
        description="Multi-platoon C-V2X resource-allocation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single training run, one metrics file")
    sweep = sub.add_parser("sweep", help="full gap x size x algorithm x seed sweep")
    agg = sub.add_parser("aggregate", help="pool metrics files into summary.csv")
    export = sub.add_parser("export", help="write plot-data files from metrics")

    for p in (run, sweep):
        p.add_argument("--config", help="config file (defaults apply when omitted)")
        p.add_argument("--episodes", type=int, help="override episode count")
        p.add_argument("--out", help="output directory (default runs/)")
    run.add_argument("--algo", help="algorithm selector")
    run.add_argument("--seed", type=int, help="run seed")
    run.set_defaults(func=_cmd_run)
    sweep.add_argument("--parallel", type=int, default=1, help="concurrent runs")
    sweep.add_argument("--rerun", action="store_true", help="ignore existing files")
    sweep.set_defaults(func=_cmd_sweep)

    for p in (agg, export):
        p.add_argument("metrics", nargs="*", help="metrics files (default: <out>/metrics_*.csv)")
        p.add_argument("--out", help="output directory (default runs/)")
        p.add_argument("--tail-window", type=int, default=None, dest="tail_window")
    agg.set_defaults(func=_cmd_aggregate)
    export.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - single reporting point
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
