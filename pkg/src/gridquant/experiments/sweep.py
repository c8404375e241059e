"""Sample-size / bin-width sweep protocol with deterministic seeding.

Every cell (s, delta_pct, trial) derives its randomness from the master seed
through a SeedSequence spawn key, so the entire sweep -- including the bytes
of the results file -- is a pure function of the SweepConfig.  Records stream
to disk as they are produced; a crash loses at most the cell in flight.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gridquant.bounds import calibrate_constant, error_bound
from gridquant.estimator import SolverConfig, recover_topology, relative_error, solve_lasso
from gridquant.experiments.feeders import load_feeder, synthetic_feeder
from gridquant.lcpf import (
    FeederSpec,
    PowerFactorModel,
    equivalent_impedance,
    ground_truth_parameters,
    scaled_impedance,
    voltages_from_injections,
)
from gridquant.quantizer import QuantizerConfig, bin_width_from_percentage, quantize_measurements
from gridquant.sensing import PowerIterationError, VoltageData, build_sensing_operator

RESULTS_HEADER = "n,s,delta,delta_pct,trial_seed,abs_err,rel_err,bound_c1,iters,wall_ms,topo_exact"

# 100 uniformly spaced sample counts covering 10..800
DEFAULT_S_GRID = tuple(int(round(v)) for v in np.linspace(10, 800, 100))
DEFAULT_DELTA_PCTS = (0.01, 0.05, 0.10, 0.20)


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one sweep; identical configs give identical bytes.

    The network comes from `feeder` if given, else from `feeder_path`, else a
    synthetic uniform random tree on synthetic_n + 1 nodes.  wall_ms is only
    measured when measure_walltime is set -- timing breaks byte-for-byte
    reproducibility of the results file, so it defaults off.
    """

    feeder: FeederSpec | None = None
    feeder_path: str | None = None
    synthetic_n: int = 32
    synthetic_seed: int = 7
    pf_phi: float = 0.9
    pf_sign: int = 1
    s_grid: tuple[int, ...] = DEFAULT_S_GRID
    delta_pcts: tuple[float, ...] = DEFAULT_DELTA_PCTS
    trials: int = 1
    p_base: float = -0.01
    noise_frac: float = 0.10
    sd_floor: float = 1e-4
    master_seed: int = 20240917
    out_dir: str | None = None
    emit_chart: bool = False
    measure_walltime: bool = False
    solver: SolverConfig = SolverConfig()

    def __post_init__(self):
        if not self.s_grid:
            raise ValueError("s_grid must be nonempty")
        if any(s < 1 for s in self.s_grid):
            raise ValueError("sample counts must be positive")
        if list(self.s_grid) != sorted(self.s_grid):
            raise ValueError("s_grid must be ascending")
        if not self.delta_pcts or any(p <= 0 for p in self.delta_pcts):
            raise ValueError("delta_pcts must be nonempty and positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.noise_frac < 0:
            raise ValueError("noise_frac must be nonnegative")

    def resolve_feeder(self) -> FeederSpec:
        if self.feeder is not None:
            return self.feeder
        if self.feeder_path is not None:
            return load_feeder(self.feeder_path)
        return synthetic_feeder(self.synthetic_n, self.synthetic_seed)


@dataclass(frozen=True)
class SweepRecord:
    """One solved cell of the sweep; maps 1:1 to a results-file row."""

    n: int
    s: int
    delta: float
    delta_pct: float
    trial_seed: int
    abs_err: float
    rel_err: float
    bound_c1: float
    iters: int
    wall_ms: float
    topo_exact: bool

    def to_row(self) -> str:
        return ",".join(
            (
                str(self.n),
                str(self.s),
                f"{self.delta:.17g}",
                f"{self.delta_pct:.17g}",
                str(self.trial_seed),
                f"{self.abs_err:.17g}",
                f"{self.rel_err:.17g}",
                f"{self.bound_c1:.17g}",
                str(self.iters),
                f"{self.wall_ms:.17g}",
                str(int(self.topo_exact)),
            )
        )

    @classmethod
    def from_row(cls, row: str) -> "SweepRecord":
        parts = row.strip().split(",")
        if len(parts) != 11:
            raise ValueError(f"expected 11 fields, got {len(parts)}: {row!r}")
        return cls(
            n=int(parts[0]),
            s=int(parts[1]),
            delta=float(parts[2]),
            delta_pct=float(parts[3]),
            trial_seed=int(parts[4]),
            abs_err=float(parts[5]),
            rel_err=float(parts[6]),
            bound_c1=float(parts[7]),
            iters=int(parts[8]),
            wall_ms=float(parts[9]),
            topo_exact=bool(int(parts[10])),
        )


def generate_voltage_data(
    feeder: FeederSpec,
    pf: PowerFactorModel,
    s: int,
    noise_frac: float,
    seed: int,
    p_base: float | np.ndarray = -0.01,
    sd_floor: float = 1e-4,
    v_base: np.ndarray | None = None,
) -> VoltageData:
    """Gaussian voltage samples around the linearized-flow baseline profile.

    Column means equal v_base = 1 + Z p_base (or a supplied v_base, e.g. an
    external AC solution); per-entry standard deviation is noise_frac times
    the baseline magnitude, floored at sd_floor.  noise_frac = 0 reproduces
    the baseline exactly in every column.
    """
    if s < 1:
        raise ValueError(f"need at least one sample, got s={s}")
    n = feeder.n
    if v_base is None:
        z = scaled_impedance(feeder, pf)
        Z = equivalent_impedance(feeder.tree, z)
        p = np.full(n, float(p_base)) if np.isscalar(p_base) else np.asarray(p_base, dtype=float)
        v_base = voltages_from_injections(Z, p)
    else:
        v_base = np.asarray(v_base, dtype=float)
    if v_base.shape != (n,):
        raise ValueError(f"baseline profile has shape {v_base.shape}, expected ({n},)")
    if noise_frac == 0:
        V = np.repeat(v_base[:, None], s, axis=1)
    else:
        sd = np.maximum(noise_frac * np.abs(v_base), sd_floor)
        rng = np.random.default_rng(seed)
        V = v_base[:, None] + sd[:, None] * rng.standard_normal((n, s))
    return VoltageData.from_voltages(V)


def _solve_cell(
    config: SweepConfig,
    feeder: FeederSpec,
    pf: PowerFactorModel,
    w_star: np.ndarray,
    radius: float,
    true_edges: frozenset,
    si: int,
    pi: int,
    ti: int,
) -> SweepRecord:
    s = config.s_grid[si]
    pct = config.delta_pcts[pi]
    ss = np.random.SeedSequence(entropy=config.master_seed, spawn_key=(si, pi, ti))
    vseed, dseed = (int(x) for x in ss.generate_state(2, np.uint64))
    voltages = generate_voltage_data(
        feeder, pf, s, config.noise_frac, vseed, p_base=config.p_base, sd_floor=config.sd_floor
    )
    op = build_sensing_operator(voltages, feeder.n)
    clean = op.apply(w_star)
    delta = bin_width_from_percentage(clean, pct)
    meas = quantize_measurements(clean, QuantizerConfig(delta=delta, seed=dseed))
    t0 = time.perf_counter() if config.measure_walltime else 0.0
    try:
        est = solve_lasso(op, meas, radius, config.solver)
        abs_err, rel_err = relative_error(est.w_hat, w_star)
        iters = est.iterations_used
        topo_exact = frozenset(recover_topology(est.w_hat, feeder.n).edges) == true_edges
    except PowerIterationError:
        abs_err, rel_err, iters, topo_exact = float("nan"), float("nan"), 0, False
    wall_ms = (time.perf_counter() - t0) * 1e3 if config.measure_walltime else 0.0
    return SweepRecord(
        n=feeder.n,
        s=s,
        delta=delta,
        delta_pct=pct,
        trial_seed=vseed,
        abs_err=abs_err,
        rel_err=rel_err,
        bound_c1=error_bound(1.0, delta, feeder.n, s),
        iters=iters,
        wall_ms=wall_ms,
        topo_exact=topo_exact,
    )


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Run every (s, delta_pct, trial) cell in canonical order.

    When config.out_dir is set, rows are appended to <out_dir>/results.csv as
    they complete, header first, flushing per row.
    """
    feeder = config.resolve_feeder()
    pf = PowerFactorModel(phi=config.pf_phi, sign=config.pf_sign)
    z = scaled_impedance(feeder, pf)
    w_star = ground_truth_parameters(feeder.tree, z)
    radius = float(np.abs(w_star).sum())
    true_edges = frozenset(feeder.tree.edges)

    out_fh = None
    if config.out_dir is not None:
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        out_fh = (out_dir / "results.csv").open("w")
        out_fh.write(RESULTS_HEADER + "\n")
        out_fh.flush()
    records: list[SweepRecord] = []
    try:
        for si in range(len(config.s_grid)):
            for pi in range(len(config.delta_pcts)):
                for ti in range(config.trials):
                    rec = _solve_cell(config, feeder, pf, w_star, radius, true_edges, si, pi, ti)
                    records.append(rec)
                    if out_fh is not None:
                        out_fh.write(rec.to_row() + "\n")
                        out_fh.flush()
    finally:
        if out_fh is not None:
            out_fh.close()
    return records


def read_records(path: str | Path) -> list[SweepRecord]:
    """Read back a results file written by run_sweep."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != RESULTS_HEADER:
        raise ValueError(f"{path}: not a results file (bad header)")
    return [SweepRecord.from_row(line) for line in lines[1:] if line.strip()]


@dataclass(frozen=True, eq=False)
class BoundCurve:
    """Calibrated bound over the sample grid for one bin-width percentage."""

    delta_pct: float
    delta: float  # representative (mean) realized bin width of the group
    s: np.ndarray
    bound_abs: np.ndarray
    bound_rel: np.ndarray


@dataclass(frozen=True, eq=False)
class OverlayReport:
    """Calibration constant plus per-bin-width bound curves for charting."""

    constant: float
    w_star_norm: float
    curves: tuple[BoundCurve, ...]
    coverage: float


def bound_coverage(records, constant: float) -> float:
    """Fraction of records whose abs_err is dominated by the calibrated bound."""
    records = [r for r in records if np.isfinite(r.abs_err)]
    if not records:
        raise ValueError("no finite records to check coverage on")
    hits = sum(1 for r in records if r.abs_err <= constant * r.bound_c1)
    return hits / len(records)


def calibrate_and_overlay(records) -> OverlayReport:
    """Calibrate the bound constant and build per-bin-width overlay curves.

    The constant is the max ratio of measured errors to the C=1 bound, so the
    calibrated bound dominates every calibration record by construction.
    """
    records = [r for r in records if np.isfinite(r.abs_err)]
    if not records:
        raise ValueError("cannot calibrate on an empty record list")
    constant = calibrate_constant(records)
    with_rel = next((r for r in records if r.rel_err > 0), None)
    w_star_norm = with_rel.abs_err / with_rel.rel_err if with_rel is not None else 1.0
    n = records[0].n
    curves = []
    for pct in sorted({r.delta_pct for r in records}):
        group = [r for r in records if r.delta_pct == pct]
        delta_rep = float(np.mean([r.delta for r in group]))
        s_vals = np.array(sorted({r.s for r in group}))
        bound_abs = np.array([error_bound(constant, delta_rep, n, int(s)) for s in s_vals])
        curves.append(
            BoundCurve(
                delta_pct=pct,
                delta=delta_rep,
                s=s_vals,
                bound_abs=bound_abs,
                bound_rel=bound_abs / w_star_norm,
            )
        )
    return OverlayReport(
        constant=constant,
        w_star_norm=w_star_norm,
        curves=tuple(curves),
        coverage=bound_coverage(records, constant),
    )
