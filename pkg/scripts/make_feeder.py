#!/usr/bin/env python3
"""Write a synthetic radial feeder to a CSV usable with gridquant --feeder.

The network is a uniformly random spanning tree on n+1 nodes (node 0 is the
slack) with per-line resistance and reactance drawn uniformly from the given
per-unit ranges.

Usage:
    python3 scripts/make_feeder.py 32 --seed 7 --out feeder32.csv
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gridquant.experiments.feeders import save_feeder, synthetic_feeder


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("n", type=int, help="number of non-slack nodes")
    ap.add_argument("--seed", type=int, default=0, help="topology/impedance seed")
    ap.add_argument("--out", default=None, help="output path (default feeder<n>.csv)")
    ap.add_argument("--r-range", default="0.02,0.2", help="resistance range, per unit")
    ap.add_argument("--x-range", default="0.01,0.1", help="reactance range, per unit")
    args = ap.parse_args()

    r_lo, r_hi = (float(v) for v in args.r_range.split(","))
    x_lo, x_hi = (float(v) for v in args.x_range.split(","))
    feeder = synthetic_feeder(args.n, args.seed, r_range=(r_lo, r_hi), x_range=(x_lo, x_hi))
    out = Path(args.out) if args.out else Path(f"feeder{args.n}.csv")
    save_feeder(feeder, out)
    print(f"wrote {len(feeder.lines)} lines ({args.n}+1 nodes) to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
