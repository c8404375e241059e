"""Linear coupled power flow on a radial feeder with a fixed power factor.

Under a constant power factor, reactive injections are a scalar multiple of
active ones (q = kappa * p), which collapses the linearized flow equations to
a single real system: voltage deviations from the 1.0 per-unit slack are
v - 1 = Z p with Z = C^{-1} diag(r + kappa*x) C^{-T}, where C is the reduced
branch-to-node incidence matrix of the tree.  The recovery target is the
vector of reciprocal scaled impedances placed on the complete-graph edge set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gridquant.graph import TreeTopology, num_edges, tree_incidence_inverse


class ModelViolationError(ValueError):
    """Physical model assumptions broken (e.g. non-positive scaled impedance)."""


@dataclass(frozen=True)
class FeederSpec:
    """A radial feeder: node count and per-line impedances in per-unit.

    Lines are (from_node, to_node, r_pu, x_pu) tuples in file order; node 0 is
    the slack.  The line set must form a spanning tree over {0..n} and every
    resistance must be strictly positive.
    """

    n: int
    lines: tuple[tuple[int, int, float, float], ...]

    def __post_init__(self):
        for a, b, r, x in self.lines:
            if r <= 0:
                raise ModelViolationError(f"line ({a}, {b}) has non-positive resistance r={r}")
        # raises TopologyError when the line set is not a spanning tree
        object.__setattr__(self, "_tree", TreeTopology.from_edges([(a, b) for a, b, _, _ in self.lines], self.n))

    @property
    def tree(self) -> TreeTopology:
        return self._tree

    def line_rx(self) -> tuple[np.ndarray, np.ndarray]:
        """(r, x) arrays reordered to tree-edge (preorder) order."""
        by_pair = {(min(a, b), max(a, b)): (r, x) for a, b, r, x in self.lines}
        r = np.array([by_pair[e][0] for e in self.tree.edges])
        x = np.array([by_pair[e][1] for e in self.tree.edges])
        return r, x


@dataclass(frozen=True)
class PowerFactorModel:
    """Fixed power factor phi in (0, 1] with an inductive (+1) or capacitive (-1) sign."""

    phi: float
    sign: int = 1

    def __post_init__(self):
        if not 0.0 < self.phi <= 1.0:
            raise ValueError(f"power factor must lie in (0, 1], got {self.phi}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def kappa(self) -> float:
        return kappa_from_power_factor(self.phi, self.sign)


def kappa_from_power_factor(phi: float, sign: int = 1) -> float:
    """Reactive-to-active injection ratio kappa = sign * sqrt(1 - phi^2)/phi."""
    if not 0.0 < phi <= 1.0:
        raise ValueError(f"power factor must lie in (0, 1], got {phi}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return sign * math.sqrt(1.0 - phi * phi) / phi


def scaled_impedance(feeder: FeederSpec, pf: PowerFactorModel) -> np.ndarray:
    """Per-line scaled impedance z = r + kappa*x, in tree-edge order.

    Every entry must come out strictly positive: the recovery target 1/z has
    to be well defined with a sign consistent across lines.
    """
    r, x = feeder.line_rx()
    z = r + pf.kappa * x
    if np.any(z <= 0):
        bad = int(np.argmin(z))
        raise ModelViolationError(
            f"scaled impedance z={z[bad]:.6g} on line {feeder.tree.edges[bad]} is not positive; "
            f"kappa={pf.kappa:.4f} overwhelms the resistance"
        )
    return z


def equivalent_impedance(tree: TreeTopology, z: np.ndarray) -> np.ndarray:
    """Equivalent impedance matrix Z = C^{-1} diag(z) C^{-T}, natural node order.

    Built from the exact integer incidence inverse, then permuted so row/column
    i corresponds to node i+1.  Entry (i, j) equals the summed scaled impedance
    on the common part of the slack->i+1 and slack->j+1 paths; in particular Z
    is symmetric positive definite for positive z.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (tree.n,):
        raise ValueError(f"impedance vector has shape {z.shape}, expected ({tree.n},)")
    if np.any(z <= 0):
        raise ModelViolationError("scaled impedances must be strictly positive")
    cinv = tree_incidence_inverse(tree).astype(float)
    z_pre = (cinv * z) @ cinv.T
    # rows/cols of z_pre follow tree.preorder; undo the permutation
    idx = np.empty(tree.n, dtype=np.int64)
    for pos, v in enumerate(tree.preorder):
        idx[v - 1] = pos
    return z_pre[np.ix_(idx, idx)]


def voltages_from_injections(Z: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Per-unit voltage magnitudes 1 + Z @ P for injection column(s) P."""
    Z = np.asarray(Z, dtype=float)
    P = np.asarray(P, dtype=float)
    if P.shape[0] != Z.shape[0]:
        raise ValueError(f"injection rows {P.shape[0]} do not match network size {Z.shape[0]}")
    return 1.0 + Z @ P


def ground_truth_parameters(tree: TreeTopology, z: np.ndarray, n: int | None = None) -> np.ndarray:
    """Recovery target: w of length (n+1 choose 2) with 1/z_k on tree edge k.

    Entries off the tree support are exactly zero, so the result is n-sparse
    and radial by construction.
    """
    z = np.asarray(z, dtype=float)
    if n is None:
        n = tree.n
    if n != tree.n or z.shape != (n,):
        raise ValueError(f"expected {tree.n} impedances for this tree, got shape {z.shape} with n={n}")
    if np.any(z <= 0):
        raise ModelViolationError("scaled impedances must be strictly positive")
    w = np.zeros(num_edges(n))
    w[tree.edge_indices()] = 1.0 / z
    return w
