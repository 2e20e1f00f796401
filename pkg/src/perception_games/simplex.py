"""Probability simplex primitives.

Beliefs are points of the probability simplex over a finite label set.
This module provides the point type, exact rational grids on the simplex,
total variation distance, and grid optimization with a Lipschitz error
bound. Everything downstream (penalties, games, solvers) works in terms
of these primitives.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Iterator, Sequence

import numpy as np

# Tolerance for probability-mass bookkeeping (sums, nonnegativity).
SUM_TOL = 1e-12
# Tolerance for weak inequality comparisons (best replies, ties).
WEAK_TOL = 1e-9

__all__ = [
    "SUM_TOL",
    "WEAK_TOL",
    "Belief",
    "dirac",
    "uniform",
    "tv_distance",
    "SimplexGrid",
    "default_resolution",
    "SimplexOptimum",
    "optimize_over_simplex",
]


class Belief:
    """A probability vector over ``n`` labels, stored read-only.

    Arithmetic never happens on Belief objects directly; call sites pull
    the underlying array out via ``np.asarray`` or ``.p``.
    """

    __slots__ = ("p",)

    def __init__(self, p: Sequence[float] | np.ndarray):
        arr = np.array(p, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("belief must be a nonempty 1-d probability vector")
        if arr.min() < -SUM_TOL:
            raise ValueError(f"belief has negative mass: {arr.min()!r}")
        total = float(arr.sum())
        if abs(total - 1.0) > WEAK_TOL:
            raise ValueError(f"belief mass sums to {total!r}, expected 1")
        arr[arr < 0.0] = 0.0
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Belief is immutable")

    @property
    def n(self) -> int:
        return self.p.size

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.p.astype(dtype)
        return self.p

    def __getitem__(self, i: int) -> float:
        return float(self.p[i])

    def __len__(self) -> int:
        return self.p.size

    def __iter__(self) -> Iterator[float]:
        return iter(self.p.tolist())

    def __eq__(self, other) -> bool:
        if isinstance(other, Belief):
            return bool(np.array_equal(self.p, other.p))
        return NotImplemented

    __hash__ = None  # mutable-array semantics; never use as a dict key

    def isclose(self, other: "Belief", tol: float = WEAK_TOL) -> bool:
        return tv_distance(self, other) <= tol

    def __repr__(self) -> str:
        body = ", ".join(repr(float(x)) for x in self.p)
        return f"Belief([{body}])"


def dirac(i: int, n: int) -> Belief:
    """Point mass on label ``i`` in a space of ``n`` labels."""
    if not 0 <= i < n:
        raise ValueError(f"label index {i} out of range for n={n}")
    p = np.zeros(n)
    p[i] = 1.0
    return Belief(p)


def uniform(n: int) -> Belief:
    return Belief(np.full(n, 1.0 / n))


def tv_distance(p, q) -> float:
    """Total variation distance, half the L1 distance."""
    a = np.asarray(p, dtype=np.float64)
    b = np.asarray(q, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("distributions have different lengths")
    return 0.5 * float(np.abs(a - b).sum())


def default_resolution(n: int) -> int:
    """Grid denominator used when the caller does not pick one.

    The ``PGAME_GRID`` environment variable overrides the default for
    every dimension at once (n=1 stays at 1, the simplex is a point).
    """
    if n <= 1:
        return 1
    env = os.environ.get("PGAME_GRID")
    if env:
        k = int(env)
        if k < 1:
            raise ValueError("PGAME_GRID must be a positive integer")
        return k
    if n == 2:
        return 200
    if n == 3:
        return 60
    return 24


class SimplexGrid:
    """All points of the simplex with coordinates ``i/resolution``.

    Points are generated in lexicographic order of the integer
    compositions (first coordinate ascending), so "first point" is a
    deterministic tie-break everywhere grids are scanned.
    """

    def __init__(self, n: int, resolution: int | None = None):
        if n < 1:
            raise ValueError("need at least one label")
        self.n = n
        self.resolution = default_resolution(n) if resolution is None else int(resolution)
        if self.resolution < 1:
            raise ValueError("resolution must be a positive integer")
        self._points: np.ndarray | None = None

    def __len__(self) -> int:
        return comb(self.resolution + self.n - 1, self.n - 1)

    def compositions(self) -> Iterator[tuple[int, ...]]:
        """Integer coordinate vectors summing to ``resolution``."""
        k, n = self.resolution, self.n
        if n == 1:
            yield (k,)
            return
        # stars and bars: n-1 bar positions among k+n-1 slots
        for bars in combinations(range(k + n - 1), n - 1):
            parts = []
            prev = -1
            for b in bars:
                parts.append(b - prev - 1)
                prev = b
            parts.append(k + n - 2 - prev)
            yield tuple(parts)

    def points(self) -> np.ndarray:
        """Array of shape (len(self), n), cached after first build."""
        if self._points is None:
            k = float(self.resolution)
            pts = np.array(list(self.compositions()), dtype=np.float64)
            pts /= k
            pts.setflags(write=False)
            self._points = pts
        return self._points

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.points())

    def covering_radius_l1(self) -> float:
        """Upper bound on the L1 distance from any simplex point to the grid."""
        return 2.0 / self.resolution

    def __repr__(self) -> str:
        return f"SimplexGrid(n={self.n}, resolution={self.resolution})"


@dataclass(frozen=True)
class SimplexOptimum:
    """Result of a grid scan over the simplex.

    ``error_bound`` bounds ``|true optimum - value|`` when a Lipschitz
    constant was supplied; None means no certificate.
    """

    value: float
    point: Belief
    error_bound: float | None
    resolution: int


def optimize_over_simplex(
    f: Callable[[np.ndarray], float],
    n: int,
    mode: str = "max",
    grid: SimplexGrid | None = None,
    resolution: int | None = None,
    lipschitz_l1: float | None = None,
) -> SimplexOptimum:
    """Scan ``f`` over a simplex grid and return the best point.

    ``f`` receives a read-only ndarray row. Ties go to the first grid
    point in lexicographic order. ``lipschitz_l1`` is the Lipschitz
    constant of ``f`` in the L1 norm; when given, the returned
    ``error_bound`` equals ``lipschitz_l1 * 2 / resolution``.
    """
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    if grid is None:
        grid = SimplexGrid(n, resolution)
    elif grid.n != n:
        raise ValueError(f"grid is over {grid.n} labels, expected {n}")
    best_val = None
    best_pt = None
    for pt in grid.points():
        val = float(f(pt))
        if best_val is None:
            best_val, best_pt = val, pt
        elif mode == "max" and val > best_val:
            best_val, best_pt = val, pt
        elif mode == "min" and val < best_val:
            best_val, best_pt = val, pt
    bound = None
    if lipschitz_l1 is not None:
        bound = float(lipschitz_l1) * grid.covering_radius_l1()
    return SimplexOptimum(
        value=best_val,
        point=Belief(best_pt),
        error_bound=bound,
        resolution=grid.resolution,
    )
