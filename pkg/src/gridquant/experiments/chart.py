"""Scatter-plus-bound-curve chart of sweep results, written as SVG."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from gridquant.experiments.sweep import OverlayReport


def emit_chart(records, report: OverlayReport, path: str | Path) -> Path:
    """Plot relative error vs samples per node, one color per bin width.

    Scatter shows individual trials; solid lines are the calibrated error
    bound scaled to relative units.  Both axes log, errors spanning decades.
    Raises on empty input before touching the filesystem.
    """
    records = [r for r in records if np.isfinite(r.rel_err)]
    if not records:
        raise ValueError("no records to chart")
    if not report.curves:
        raise ValueError("overlay report carries no bound curves")
    path = Path(path)

    # keep text as text so the SVG stays small and greppable
    plt.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    cmap = plt.get_cmap("tab10")
    for idx, curve in enumerate(report.curves):
        color = cmap(idx % 10)
        group = [r for r in records if r.delta_pct == curve.delta_pct]
        ax.scatter(
            [r.s for r in group],
            [r.rel_err for r in group],
            s=12,
            alpha=0.45,
            color=color,
            edgecolors="none",
            label=f"Δ = {curve.delta_pct:.0%} of mean |p|",
        )
        ax.plot(curve.s, curve.bound_rel, color=color, linewidth=1.8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("samples per node  s")
    ax.set_ylabel(r"relative error  $\|\hat{w} - w_\star\|_2 / \|w_\star\|_2$")
    ax.set_title(f"Error scaling with calibrated bound (C = {report.constant:.2f})")
    ax.legend(loc="lower left", fontsize=8, framealpha=0.9)
    ax.grid(True, which="both", alpha=0.25, linewidth=0.5)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
