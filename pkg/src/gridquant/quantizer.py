"""Uniformly dithered scalar quantization of power measurements.

A measurement x is offset by a uniform dither tau ~ U[-delta/2, delta/2) and
snapped to the center of its bin: Q(x) = delta * (floor((x + tau)/delta) + 1/2).
Averaged over the dither the quantizer is unbiased, E[Q(x)] = x, and the
per-sample error never exceeds delta.  Dithers come from a counter-based
generator so a (seed, index) pair always maps to the same offset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateInputError(ValueError):
    """Input data that makes a numeric rule meaningless (e.g. all-zero signal)."""


@dataclass(frozen=True)
class QuantizerConfig:
    """Bin width and dither seed for one measurement set."""

    delta: float
    seed: int

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"bin width must be positive, got {self.delta}")


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Quantized measurements: every entry is an odd multiple of delta/2."""

    p: np.ndarray
    delta: float
    seed: int

    def __len__(self) -> int:
        return self.p.shape[0]


def dither(rng: np.random.Generator, delta: float) -> float:
    """One uniform dither on [-delta/2, delta/2) from the given generator."""
    if not delta > 0:
        raise ValueError(f"bin width must be positive, got {delta}")
    return float(rng.uniform(-0.5 * delta, 0.5 * delta))


def dither_stream(seed: int, count: int, delta: float) -> np.ndarray:
    """All dithers for a measurement set, from a counter-based Philox stream.

    Entry i depends only on (seed, i), never on how many entries are drawn, so
    prefixes of longer streams match shorter ones exactly.
    """
    if not delta > 0:
        raise ValueError(f"bin width must be positive, got {delta}")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    return rng.uniform(-0.5 * delta, 0.5 * delta, size=count)


def quantize(x, tau, delta: float):
    """Bin-center quantizer delta*(floor((x + tau)/delta) + 1/2); |Q(x) - x| <= delta."""
    if not delta > 0:
        raise ValueError(f"bin width must be positive, got {delta}")
    return delta * (np.floor((np.asarray(x, dtype=float) + tau) / delta) + 0.5)


def quantize_measurements(clean: np.ndarray, config: QuantizerConfig) -> MeasurementSet:
    """Quantize a clean vector with one fresh dither per entry.

    Deterministic: the same (clean, config) always produces a bit-identical
    measurement set.
    """
    clean = np.asarray(clean, dtype=float)
    taus = dither_stream(config.seed, clean.shape[0], config.delta)
    p = quantize(clean, taus, config.delta)
    return MeasurementSet(p=p, delta=config.delta, seed=config.seed)


def bin_width_from_percentage(clean: np.ndarray, pct: float) -> float:
    """Bin width as a fraction of the sample mean absolute measurement value."""
    if not pct > 0:
        raise ValueError(f"percentage must be positive, got {pct}")
    clean = np.asarray(clean, dtype=float)
    mean_abs = float(np.mean(np.abs(clean)))
    if mean_abs == 0.0:
        raise DegenerateInputError("all-zero measurement vector has no scale to set a bin width")
    return pct * mean_abs
