#!/usr/bin/env python3
"""Run the unit-square point-cloud experiment with both bundled configs.

Writes one trajectory directory per config (same layout as ``mpgrad
optimize``) and prints a side-by-side summary: objective, diameter ratio and
largest point norm over the run.

    python3 scripts/run_pointcloud_experiment.py --out runs/unit-square
"""

import argparse
import json
import sys
from pathlib import Path

from mpgrad.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = {
    "one-parameter (Rips)": ROOT / "configs" / "unit-square-1param.json",
    "two-parameter (function-Rips)": ROOT / "configs" / "unit-square-2param.json",
}


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="runs/unit-square", help="parent directory for the two runs")
    p.add_argument("--epochs", type=int, default=None, help="override the configured epoch count")
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")
    return p.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    out = Path(args.out)
    rows = []
    for label, cfg in CONFIGS.items():
        run_dir = out / cfg.stem
        cmd = ["optimize", "--config", str(cfg), "--out", str(run_dir)]
        if args.epochs is not None:
            cmd += ["--epochs", str(args.epochs)]
        if args.seed is not None:
            cmd += ["--seed", str(args.seed)]
        print(f"== {label}")
        code = cli_main(cmd)
        if code != 0:
            return code
        rows.append((label, json.loads((run_dir / "summary.json").read_text())))

    print()
    print(f"{'run':32s} {'objective':>21s} {'diam. ratio':>12s} {'max norm':>9s}")
    for label, s in rows:
        obj = f"{s['initial_objective']:.4f} -> {s['final_objective']:.4f}"
        print(f"{label:32s} {obj:>21s} {s['diameter_ratio']:12.3f} {s['max_norm']:9.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
