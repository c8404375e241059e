"""Feeder file ingestion and synthetic feeder generation.

Feeder files are plain comma-separated text with the fixed header
``from,to,r_pu,x_pu`` and one branch per line; node 0 is the slack.  Decimal
floats only -- parsing is locale-independent by construction.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from gridquant.graph import TopologyError, random_spanning_tree
from gridquant.lcpf import FeederSpec, ModelViolationError

FEEDER_HEADER = ("from", "to", "r_pu", "x_pu")


class FeederFileError(ValueError):
    """Feeder file that cannot be parsed into a valid radial network."""


def load_feeder(path: str | Path) -> FeederSpec:
    """Parse and validate a feeder file into a FeederSpec.

    Raises FeederFileError with the offending line number on parse problems,
    on duplicate branches, and on any topology/positivity violation.
    """
    path = Path(path)
    lines: list[tuple[int, int, float, float]] = []
    seen: dict[tuple[int, int], int] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FeederFileError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != FEEDER_HEADER:
            raise FeederFileError(f"{path}:1: expected header {','.join(FEEDER_HEADER)!r}, got {','.join(header)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise FeederFileError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            try:
                a, b = int(row[0]), int(row[1])
                r, x = float(row[2]), float(row[3])
            except ValueError as exc:
                raise FeederFileError(f"{path}:{lineno}: {exc}") from None
            if a < 0 or b < 0 or a == b:
                raise FeederFileError(f"{path}:{lineno}: invalid branch ({a}, {b})")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise FeederFileError(
                    f"{path}:{lineno}: duplicate branch {key} (first seen on line {seen[key]}); "
                    "network is not radial"
                )
            seen[key] = lineno
            lines.append((a, b, r, x))
    if not lines:
        raise FeederFileError(f"{path}: no branch rows")
    n = max(max(a, b) for a, b, _, _ in lines)
    try:
        return FeederSpec(n=n, lines=tuple(lines))
    except (TopologyError, ModelViolationError) as exc:
        raise FeederFileError(f"{path}: {exc}") from exc


def save_feeder(feeder: FeederSpec, path: str | Path) -> Path:
    """Write a FeederSpec in the feeder file format; returns the path."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(FEEDER_HEADER) + "\n")
        for a, b, r, x in feeder.lines:
            fh.write(f"{a},{b},{r:.17g},{x:.17g}\n")
    return path


def synthetic_feeder(
    n: int,
    seed: int,
    r_range: tuple[float, float] = (0.02, 0.2),
    x_range: tuple[float, float] = (0.01, 0.1),
) -> FeederSpec:
    """Random radial feeder: uniform spanning tree, uniform per-line r and x.

    The default ranges give per-unit impedances in the ballpark of published
    medium-voltage test feeders; deterministic for a fixed seed.
    """
    tree = random_spanning_tree(n, seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    r = rng.uniform(*r_range, size=n)
    x = rng.uniform(*x_range, size=n)
    lines = tuple((i, j, float(rk), float(xk)) for (i, j), rk, xk in zip(tree.edges, r, x))
    return FeederSpec(n=n, lines=lines)
