"""Command-line entry point for the simulation experiments and single fits.

Usage: ``penspline <experiment> --config <path.json> [--seed S] [--out DIR]
[--threads T]``; the ``fit`` experiment additionally accepts ``--data`` with a
two-column (x, y) CSV. Exit codes: 0 success, 2 config error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import harness
from .errors import ConfigError, PensplineError


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="penspline",
        description="Penalized-spline regression experiments and fits.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in harness.EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="JSON config file; unknown keys are rejected")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        if name == "fit":
            p.add_argument("--data", help="CSV with header columns x,y")
    return parser


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        if args.experiment == "fit" and args.data is not None:
            config["data"] = args.data
        t0 = time.perf_counter()
        if args.experiment == "fit":
            records, curve = harness.run_fit(config, threads=args.threads)
            harness.write_curve(curve, args.out)
        else:
            records = harness.RUNNERS[args.experiment](config, threads=args.threads)
        harness.write_results(records, args.out, config, time.perf_counter() - t0)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PensplineError, FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
