"""Closed-form error-bound calculators and a Monte Carlo width estimator.

The effective dimension of recovering an n-sparse radial parameter vector
inside the l1 ball scales as 2n*ln((n+1)/2) + 1.5n -- the generic s-sparse
width bound 2s*ln(d/s) + 1.5s evaluated at s = n, d = (n+1 choose 2).  The
resulting estimation-error bound is C * delta * sqrt((2 ln((n+1)/2) + 3/2)/s)
for s samples per node, with C calibrated empirically per network as the
maximum ratio of measured errors to the C=1 bound.

estimate_gaussian_width_sq is a test utility: it Monte Carlo estimates the
squared width (statistical dimension) of the descent cone of the l1 ball at a
sparse point, using the closed-form supremum over the cone's unit shell, and
exists to verify the inequality direction of the closed-form bound.
"""

from __future__ import annotations

import math

import numpy as np

from gridquant.graph import num_edges


def sparse_width_sq_bound(s: int, d: int) -> float:
    """Generic squared-width bound 2s*ln(d/s) + 1.5s for s-sparse targets in R^d."""
    if not 1 <= s < d:
        raise ValueError(f"need 1 <= s < d, got s={s}, d={d}")
    return 2.0 * s * math.log(d / s) + 1.5 * s


def gaussian_width_sq_bound(n: int) -> float:
    """Squared-width bound 2n*ln((n+1)/2) + 1.5n for an n-node radial network."""
    if n < 2:
        raise ValueError(f"bound requires n >= 2, got n={n}")
    return 2.0 * n * math.log((n + 1) / 2.0) + 1.5 * n


def error_bound(C: float, delta: float, n: int, s: int) -> float:
    """Estimation-error bound C * delta * sqrt((2 ln((n+1)/2) + 3/2)/s)."""
    if n < 2:
        raise ValueError(f"bound requires n >= 2, got n={n}")
    if not (C > 0 and delta > 0 and s > 0):
        raise ValueError(f"C, delta, s must be positive, got C={C}, delta={delta}, s={s}")
    return C * delta * math.sqrt((2.0 * math.log((n + 1) / 2.0) + 1.5) / s)


def min_samples_per_node(n: int, c1: float = 1.0, c2: float = 0.0) -> int:
    """Smallest integer s with s >= c1*(2 ln((n+1)/2) + 3/2) + c2."""
    if n < 2:
        raise ValueError(f"bound requires n >= 2, got n={n}")
    if c1 <= 0 or c2 < 0:
        raise ValueError(f"need c1 > 0 and c2 >= 0, got c1={c1}, c2={c2}")
    return math.ceil(c1 * (2.0 * math.log((n + 1) / 2.0) + 1.5) + c2)


def calibrate_constant(records) -> float:
    """Calibrated constant: max over records of abs_err / error_bound(C=1).

    Records need abs_err, delta, n, s attributes.  By construction the bound
    with the returned constant dominates every calibrated record.
    """
    records = list(records)
    if not records:
        raise ValueError("cannot calibrate on an empty record list")
    return max(rec.abs_err / error_bound(1.0, rec.delta, rec.n, rec.s) for rec in records)


def _descent_cone_sup(g: np.ndarray, sparsity: int) -> np.ndarray:
    """sup over the l1-ball descent cone's unit shell of <g, u>, per row of g.

    The cone at a sparsity-s point with all-equal-magnitude support is
    {u : sum_S sigma_i u_i + ||u_Sc||_1 <= 0}.  By Moreau, the supremum equals
    ||proj_cone(g)|| = dist(g, polar cone), and the polar is the nonnegative
    span of {v : v_S = sigma, |v_Sc| <= 1}.  The distance minimization over
    the span scale t >= 0 is one-dimensional and convex; a vectorized
    bisection solves all Monte Carlo draws at once.  By sign symmetry of g the
    support signs can be taken all +1.
    """
    trials, d = g.shape
    if sparsity == 0:
        return np.linalg.norm(g, axis=1)
    gs = g[:, :sparsity]
    gc_abs = np.abs(g[:, sparsity:])

    def dist_deriv(t):
        # d/dt of sum_S (g_i - t)^2 + sum_Sc (|g_i| - t)_+^2, halved
        return -(gs - t[:, None]).sum(axis=1) - np.maximum(gc_abs - t[:, None], 0.0).sum(axis=1)

    # derivative is nondecreasing in t; root-find by bisection, all draws at once
    deriv_at_zero = dist_deriv(np.zeros(trials))
    lo = np.zeros(trials)
    hi = np.maximum(np.abs(g).max(axis=1), 1e-12)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        neg = dist_deriv(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    t_opt = np.where(deriv_at_zero >= 0, 0.0, 0.5 * (lo + hi))
    dist_sq = ((gs - t_opt[:, None]) ** 2).sum(axis=1) + (
        np.maximum(gc_abs - t_opt[:, None], 0.0) ** 2
    ).sum(axis=1)
    return np.sqrt(dist_sq)


def estimate_gaussian_width_sq(
    n: int | None = None,
    trials: int = 2000,
    rng_seed: int = 0,
    *,
    dim: int | None = None,
    sparsity: int | None = None,
) -> tuple[float, float]:
    """Monte Carlo estimate of the squared width of the l1 descent-cone shell.

    Given a network size n the ambient dimension is (n+1 choose 2) and the
    sparsity is n; dim/sparsity override both for synthetic cases.  sparsity=0
    means the unconstrained cone (full shell), whose squared width equals the
    ambient dimension -- the estimator's self-test.  Returns (estimate,
    standard error) of the mean squared supremum.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if dim is None or sparsity is None:
        if n is None:
            raise ValueError("pass either n or both dim and sparsity")
        dim = num_edges(n) if dim is None else dim
        sparsity = n if sparsity is None else sparsity
    if not 0 <= sparsity <= dim:
        raise ValueError(f"need 0 <= sparsity <= dim, got sparsity={sparsity}, dim={dim}")
    rng = np.random.default_rng(rng_seed)
    g = rng.standard_normal((trials, dim))
    sup = _descent_cone_sup(g, sparsity)
    sup_sq = sup * sup
    est = float(sup_sq.mean())
    stderr = float(sup_sq.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return est, stderr
