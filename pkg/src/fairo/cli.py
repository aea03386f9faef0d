"""Command line front end: run / compare / sweep.

Errors print a single machine-readable JSON line to stderr and exit nonzero.
The FAIRO_OUT environment variable overrides the default output root (./runs).
"""

import argparse
import json
import sys
from pathlib import Path

from fairo import harness


def parse_seeds(text):
    """'1..10' or '1,4,9' or '7' -> list of ints."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        start, stop = int(lo), int(hi)
        if stop < start:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(start, stop + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="fairo", description="fairness-aware control experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one seeded experiment")
    p_run.add_argument("--config", required=True, help="experiment config JSON")
    p_run.add_argument("--seed", type=int, default=None, help="override config seed")
    p_run.add_argument("--out", default=None, help="output directory")

    p_cmp = sub.add_parser("compare", help="compare finished run directories")
    p_cmp.add_argument("--runs", nargs="+", required=True, help="run directories")
    p_cmp.add_argument("--window", type=int, default=3000, help="evaluation window (ticks)")
    p_cmp.add_argument("--out", default=None, help="directory for comparison.csv/.txt")

    p_sweep = sub.add_parser("sweep", help="run a config across seeds")
    p_sweep.add_argument("--config", required=True, help="experiment config JSON")
    p_sweep.add_argument("--seeds", required=True, help="seed list: '1..10' or '1,2,3'")
    p_sweep.add_argument("--out", default=None, help="output root directory")
    return parser


def cmd_run(args):
    config = harness.load_config(args.config, seed=args.seed)
    out_dir = args.out
    if out_dir is None:
        name = f"{config.app_type}_{config.method}_seed{config.seed}"
        out_dir = harness.default_out_root() / name
    artifact = harness.run(config, out_dir=out_dir)
    print(f"run complete: {artifact.out_dir}")
    print(f"  min_l_mean={artifact.metric('min_l_mean'):.4f}"
          f" satisfaction_jsd_avg={artifact.metric('satisfaction_jsd_avg'):.4f}")
    return 0


def cmd_compare(args):
    for run_dir in args.runs:
        if not Path(run_dir).is_dir():
            raise FileNotFoundError(f"run directory not found: {run_dir}")
    rows, text = harness.compare(args.runs, window=args.window)
    if args.out is not None:
        harness.write_comparison(rows, text, args.out)
        print(f"comparison written: {args.out}")
    else:
        print(text)
    return 0


def cmd_sweep(args):
    config = harness.load_config(args.config)
    seeds = parse_seeds(args.seeds)
    out_root = args.out
    if out_root is None:
        name = f"sweep_{config.app_type}_{config.method}"
        out_root = harness.default_out_root() / name
    harness.sweep(config, seeds, out_root=out_root)
    print(f"sweep complete: {out_root} ({len(seeds)} seeds)")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "compare": cmd_compare, "sweep": cmd_sweep}
    try:
        return handlers[args.command](args)
    except Exception as exc:  # surfaced as machine-readable line, per interface
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
