#!/usr/bin/env python3
"""Reproduce the error-scaling study on a synthetic radial feeder.

Sweeps samples-per-node and quantizer bin width on a 32-node random tree,
fits the log-log decay rate of the median relative error for each bin width,
calibrates the closed-form bound constant, and writes results.csv plus
chart.svg.  The defaults run a 6-point sample grid (a minute or so); --full
switches to the dense 100-point grid used for the overlay figure.

Usage:
    python3 scripts/run_scaling_study.py [--out-dir DIR] [--trials T]
                                         [--seed SEED] [--full]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gridquant.bounds import calibrate_constant, gaussian_width_sq_bound
from gridquant.experiments.chart import emit_chart
from gridquant.experiments.sweep import (
    DEFAULT_S_GRID,
    SweepConfig,
    bound_coverage,
    calibrate_and_overlay,
    run_sweep,
)

COARSE_S_GRID = (25, 50, 100, 200, 400, 800)
DELTA_PCTS = (0.01, 0.05, 0.10, 0.20)


def fit_slope(records, s_grid, pct):
    medians = [
        np.median([r.rel_err for r in records if r.s == s and r.delta_pct == pct])
        for s in s_grid
    ]
    return float(np.polyfit(np.log(s_grid), np.log(medians), 1)[0]), medians


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="scaling_study", help="output directory")
    ap.add_argument("--trials", type=int, default=20, help="trials per cell")
    ap.add_argument("--seed", type=int, default=20240917, help="master seed")
    ap.add_argument("--n", type=int, default=32, help="non-slack node count")
    ap.add_argument("--full", action="store_true", help="dense 100-point sample grid")
    args = ap.parse_args()

    s_grid = DEFAULT_S_GRID if args.full else COARSE_S_GRID
    config = SweepConfig(
        synthetic_n=args.n,
        synthetic_seed=7,
        s_grid=s_grid,
        delta_pcts=DELTA_PCTS,
        trials=args.trials,
        master_seed=args.seed,
        out_dir=args.out_dir,
    )

    cells = len(s_grid) * len(DELTA_PCTS) * args.trials
    print(f"sweeping {cells} cells on a {args.n}-node tree "
          f"(s in {s_grid[0]}..{s_grid[-1]}, bin widths {DELTA_PCTS})")
    t0 = time.perf_counter()
    records = run_sweep(config)
    print(f"done in {time.perf_counter() - t0:.1f}s")

    print(f"\n{'bin width':>10} {'slope':>8} {'median rel_err':>30}")
    for pct in DELTA_PCTS:
        slope, med = fit_slope(records, s_grid, pct)
        print(f"{pct:>9.0%} {slope:>8.3f}   s={s_grid[0]}: {med[0]:.4f}  ->  "
              f"s={s_grid[-1]}: {med[-1]:.4f}")
    print("\ntheory: slope -0.5 (error ~ C*delta*sqrt(width^2/s), "
          f"width^2 bound {gaussian_width_sq_bound(args.n):.1f})")

    constant = calibrate_constant(records)
    report = calibrate_and_overlay(records)
    print(f"calibrated C = {constant:.2f}; "
          f"bound covers {bound_coverage(records, constant):.1%} of this sweep")

    chart = emit_chart(records, report, Path(args.out_dir) / "chart.svg")
    print(f"\nresults: {Path(args.out_dir) / 'results.csv'}")
    print(f"chart:   {chart}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
