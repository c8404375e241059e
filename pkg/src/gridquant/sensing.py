"""Sensing operator mapping line parameters to stacked power injections.

With voltage deviations U = V - 1 (columns are time samples), the operator is
the Khatri-Rao product A = U^T C~^T (x) C~^T over the complete-graph incidence
rows: column k of A is (U^T c_k) kron c_k, where c_k is the slack-reduced
incidence vector of edge k.  Equivalently A w = vec(Y~(w) U) for the reduced
admittance lifting Y~(w) = C~^T diag(w) C~, which is how the matrix-free path
applies it.  The Gram matrix has the closed form

    A^T A = (C~ U U^T C~^T) o (C~ C~^T)      (o = entrywise product)

which the solver exploits: one d x d matrix paid once, then O(d^2) per
iteration independent of the sample count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from gridquant.graph import complete_incidence, num_edges
from gridquant.quantizer import MeasurementSet, QuantizerConfig, quantize_measurements


class PowerIterationError(RuntimeError):
    """Operator-norm power iteration failed to converge within its cap."""


@dataclass(frozen=True, eq=False)
class VoltageData:
    """Per-unit voltage magnitudes V (n x s) and their deviations U = V - 1."""

    V: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "V", np.asarray(self.V, dtype=float))
        object.__setattr__(self, "U", np.asarray(self.U, dtype=float))
        if self.V.ndim != 2 or self.V.shape != self.U.shape:
            raise ValueError(f"V and U must be equal-shape matrices, got {self.V.shape} vs {self.U.shape}")
        if not np.allclose(self.U, self.V - 1.0, rtol=0.0, atol=1e-12):
            raise ValueError("deviation matrix U must equal V - 1 entrywise")

    @classmethod
    def from_voltages(cls, V: np.ndarray) -> "VoltageData":
        V = np.asarray(V, dtype=float)
        return cls(V=V, U=V - 1.0)

    @property
    def n(self) -> int:
        return self.V.shape[0]

    @property
    def s(self) -> int:
        return self.V.shape[1]


@dataclass(frozen=True, eq=False)
class SensingOperator:
    """Immutable A with materialized and matrix-free application paths.

    data is the n x s matrix the operator couples to (voltage deviations under
    the default construction).  Derived matrices are cached on first use.
    """

    data: np.ndarray
    n: int = field(init=False)
    s: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError(f"expected an n x s data matrix, got shape {data.shape}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "n", data.shape[0])
        object.__setattr__(self, "s", data.shape[1])
        object.__setattr__(self, "d", num_edges(data.shape[0]))

    @cached_property
    def _incidence(self) -> np.ndarray:
        """Reduced complete-graph incidence, d x n float."""
        return complete_incidence(self.n, drop_slack=True).astype(float)

    @cached_property
    def _edge_data(self) -> np.ndarray:
        """G = C~ U, shape d x s: per-edge differences of the data columns."""
        return self._incidence @ self.data

    @cached_property
    def gram(self) -> np.ndarray:
        """A^T A in closed form, (G G^T) o (C~ C~^T); d x d."""
        cr = self._incidence
        g = self._edge_data
        return (g @ g.T) * (cr @ cr.T)

    def materialize(self) -> np.ndarray:
        """Dense sn x d matrix with rows ordered sample-major: row t*n + i."""
        # column k = (U^T c_k) kron c_k
        return np.einsum("kt,ki->tik", self._edge_data, self._incidence).reshape(self.s * self.n, self.d)

    def apply(self, w: np.ndarray) -> np.ndarray:
        """A w = vec(Y~(w) U), sample-major stacking; length s*n."""
        w = np.asarray(w, dtype=float)
        if w.shape != (self.d,):
            raise ValueError(f"parameter vector has shape {w.shape}, expected ({self.d},)")
        # Y~(w) U = C~^T diag(w) G, columns are time samples
        out = self._incidence.T @ (w[:, None] * self._edge_data)
        return out.T.reshape(-1)

    def apply_adjoint(self, r: np.ndarray) -> np.ndarray:
        """A^T r; entry k = sum_t (c_k^T r_t)(c_k^T u_t) for residual columns r_t."""
        r = np.asarray(r, dtype=float)
        if r.shape != (self.s * self.n,):
            raise ValueError(f"residual has shape {r.shape}, expected ({self.s * self.n},)")
        rmat = r.reshape(self.s, self.n).T
        return ((self._incidence @ rmat) * self._edge_data).sum(axis=1)

    def operator_norm_sq(self, tol: float = 1e-6, max_iters: int = 5000) -> float:
        """Largest eigenvalue of A^T A by power iteration to relative tolerance tol."""
        if not tol > 0:
            raise ValueError(f"tolerance must be positive, got {tol}")
        h = self.gram
        v = np.full(self.d, 1.0 / np.sqrt(self.d))
        lam = 0.0
        for it in range(max_iters):
            hv = h @ v
            norm = float(np.linalg.norm(hv))
            if norm == 0.0:
                return 0.0  # zero operator
            lam_new = float(v @ hv)
            v = hv / norm
            if it > 0 and abs(lam_new - lam) <= tol * max(abs(lam_new), 1e-300):
                return lam_new
            lam = lam_new
        raise PowerIterationError(
            f"power iteration did not converge in {max_iters} iterations: "
            f"last estimates {lam:.12g} -> {lam_new:.12g} (rel change {abs(lam_new - lam) / max(abs(lam_new), 1e-300):.3g})"
        )


def build_sensing_operator(voltages: VoltageData, n: int, use_raw_voltages: bool = False) -> SensingOperator:
    """Assemble the operator from voltage data.

    The default couples injections to deviations U = V - 1, the choice
    consistent with the linearized flow model; use_raw_voltages builds from V
    itself for comparison (the two differ once the slack column is removed).
    """
    if voltages.n != n:
        raise ValueError(f"voltage data has {voltages.n} rows, expected n={n}")
    return SensingOperator(data=voltages.V if use_raw_voltages else voltages.U)


def generate_measurements(op: SensingOperator, w_star: np.ndarray, qconfig: QuantizerConfig) -> MeasurementSet:
    """Quantized observations Q(A w_star) with per-index dithers from qconfig."""
    return quantize_measurements(op.apply(w_star), qconfig)
