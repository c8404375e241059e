"""Command-line sweep runner.

Configuration comes from an optional flat key=value file plus flag overrides;
flags win.  Exit codes: 0 success, 2 configuration error, 3 data error
(feeder file or model violation), 4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from gridquant.estimator import SolverConfig
from gridquant.experiments.chart import emit_chart
from gridquant.experiments.feeders import FeederFileError
from gridquant.experiments.sweep import SweepConfig, calibrate_and_overlay, run_sweep
from gridquant.graph import TopologyError
from gridquant.lcpf import ModelViolationError
from gridquant.sensing import PowerIterationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_INT_KEYS = {"synthetic_n", "synthetic_seed", "trials", "master_seed", "pf_sign", "solver_max_iters"}
_FLOAT_KEYS = {"pf_phi", "p_base", "noise_frac", "sd_floor", "solver_rel_tol"}
_BOOL_KEYS = {"emit_chart", "measure_walltime"}
_STR_KEYS = {"feeder_path", "out_dir"}
_LIST_KEYS = {"s_grid", "delta_pcts"}
_KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | _STR_KEYS | _LIST_KEYS


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_config_file(path: str | Path) -> dict:
    """Flat key=value lines; '#' starts a comment; keys match SweepConfig fields."""
    out: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _BOOL_KEYS:
                out[key] = _parse_bool(value)
            elif key in _LIST_KEYS:
                parts = [p for p in value.split(",") if p.strip()]
                out[key] = tuple(int(p) for p in parts) if key == "s_grid" else tuple(float(p) for p in parts)
            else:
                out[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridquant",
        description="Sweep sample size and quantizer bin width on a radial feeder, "
        "recording parameter-estimation errors and calibrated bound curves.",
    )
    parser.add_argument("--config", help="flat key=value config file; flags override it")
    parser.add_argument("--feeder", help="feeder CSV file (header from,to,r_pu,x_pu); node 0 is the slack")
    parser.add_argument("--synthetic-n", type=int, help="generate a random radial network with this many non-slack nodes")
    parser.add_argument("--seed", type=int, help="master seed (also seeds the synthetic network)")
    parser.add_argument("--s-grid", help="comma-separated samples-per-node values, ascending")
    parser.add_argument("--delta-pcts", help="comma-separated bin-width percentages, e.g. 0.01,0.05")
    parser.add_argument("--trials", type=int, help="trials per (s, delta) cell")
    parser.add_argument("--pf", type=float, help="power factor in (0, 1]")
    parser.add_argument("--pf-sign", type=int, choices=(1, -1), help="+1 inductive, -1 capacitive")
    parser.add_argument("--p-base", type=float, help="uniform base injection per node (per-unit)")
    parser.add_argument("--noise-frac", type=float, help="voltage noise fraction (default 0.10)")
    parser.add_argument("--out-dir", help="output directory (default sweep_out)")
    parser.add_argument("--emit-chart", action="store_true", default=None, help="write chart.svg next to results.csv")
    parser.add_argument("--measure-walltime", action="store_true", default=None, help="record real wall times (breaks byte reproducibility)")
    return parser


def build_config(args: argparse.Namespace) -> SweepConfig:
    kwargs: dict = {}
    if args.config:
        kwargs.update(parse_config_file(args.config))

    if args.feeder is not None:
        kwargs["feeder_path"] = args.feeder
    if args.synthetic_n is not None:
        kwargs["synthetic_n"] = args.synthetic_n
    if args.seed is not None:
        kwargs["master_seed"] = args.seed
        kwargs["synthetic_seed"] = args.seed
    if args.s_grid is not None:
        try:
            kwargs["s_grid"] = tuple(int(p) for p in args.s_grid.split(",") if p.strip())
        except ValueError as exc:
            raise ConfigError(f"--s-grid: {exc}") from exc
    if args.delta_pcts is not None:
        try:
            kwargs["delta_pcts"] = tuple(float(p) for p in args.delta_pcts.split(",") if p.strip())
        except ValueError as exc:
            raise ConfigError(f"--delta-pcts: {exc}") from exc
    if args.trials is not None:
        kwargs["trials"] = args.trials
    if args.pf is not None:
        kwargs["pf_phi"] = args.pf
    if args.pf_sign is not None:
        kwargs["pf_sign"] = args.pf_sign
    if args.p_base is not None:
        kwargs["p_base"] = args.p_base
    if args.noise_frac is not None:
        kwargs["noise_frac"] = args.noise_frac
    if args.out_dir is not None:
        kwargs["out_dir"] = args.out_dir
    if args.emit_chart is not None:
        kwargs["emit_chart"] = True
    if args.measure_walltime is not None:
        kwargs["measure_walltime"] = True

    kwargs.setdefault("out_dir", "sweep_out")
    solver_kwargs = {}
    if "solver_max_iters" in kwargs:
        solver_kwargs["max_iters"] = kwargs.pop("solver_max_iters")
    if "solver_rel_tol" in kwargs:
        solver_kwargs["rel_tol"] = kwargs.pop("solver_rel_tol")
    if solver_kwargs:
        kwargs["solver"] = SolverConfig(**solver_kwargs)
    try:
        return SweepConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        feeder = config.resolve_feeder()
    except (FeederFileError, TopologyError, ModelViolationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    try:
        records = run_sweep(config)
        report = calibrate_and_overlay(records)
        chart_path = None
        if config.emit_chart:
            chart_path = emit_chart(records, report, Path(config.out_dir) / "chart.svg")
    except ModelViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, PowerIterationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        # DegenerateInputError, all-cells-failed calibration, linalg breakdowns
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    finite = [r for r in records if np.isfinite(r.rel_err)]
    print(f"network: n={feeder.n} nodes (+slack), {len(config.s_grid)} sample counts, "
          f"{len(config.delta_pcts)} bin widths, {config.trials} trial(s) per cell")
    print(f"records: {len(records)} ({len(records) - len(finite)} failed)")
    print(f"calibrated C = {report.constant:.4f}; bound coverage on this sweep: {report.coverage:.1%}")
    print(f"results: {Path(config.out_dir) / 'results.csv'}")
    if chart_path is not None:
        print(f"chart:   {chart_path}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
