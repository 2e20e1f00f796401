"""Perception penalty catalog.

A penalty is the belief-dependent part of a utility: the cost ``w(mu)``
a type pays when observers hold belief ``mu`` about it. The catalog
covers the shapes the solvers know how to bound exactly:

- ``zero``: no belief sensitivity.
- ``tv_to_prior``: ``weight * TV(mu, prior)``, punishes any leakage.
- ``exposure``: ``weight * mu[type]``, punishes mass on the true type.
- ``piecewise_linear_marginal``: ``weight * g(x)`` where ``x`` is the
  mass ``mu`` puts on an event (a set of type labels) and ``g`` is a
  piecewise linear function given by knots covering [0, 1].
- ``step_marginal``: piecewise constant in the same marginal ``x``,
  given by value pieces with half-open or closed bounds. Discontinuous,
  so games using it must opt in via ``allow_discontinuous``.

Ranges over the simplex are computed in closed form for every kind,
with witness beliefs attaining them. The Lipschitz constants reported
here feed the grid-search error bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .simplex import Belief, dirac

KINDS = ("zero", "tv_to_prior", "exposure", "piecewise_linear_marginal", "step_marginal")
MARGINAL_KINDS = ("piecewise_linear_marginal", "step_marginal")

__all__ = [
    "KINDS",
    "MARGINAL_KINDS",
    "PenaltySpec",
    "PenaltyRange",
    "piecewise_linear_value",
    "step_value",
    "penalty_value",
    "penalty_range",
    "validate_spec",
]


@dataclass(frozen=True)
class PenaltySpec:
    """Declarative description of one type's perception penalty.

    ``knots`` is a tuple of (x, y) pairs for the piecewise linear kind.
    ``pieces`` is a tuple of (lo, hi, value, include_lo, include_hi)
    for the step kind, matched first to last; unmatched x has value 0.
    ``marginal_over`` lists the type labels of the event whose posterior
    mass is the argument of the marginal kinds.
    """

    kind: str
    weight: float = 1.0
    knots: tuple[tuple[float, float], ...] | None = None
    marginal_over: tuple[str, ...] | None = None
    pieces: tuple[tuple[float, float, float, bool, bool], ...] | None = None

    @classmethod
    def zero(cls) -> "PenaltySpec":
        return cls(kind="zero", weight=0.0)

    @classmethod
    def tv_to_prior(cls, weight: float) -> "PenaltySpec":
        return cls(kind="tv_to_prior", weight=weight)

    @classmethod
    def exposure(cls, weight: float) -> "PenaltySpec":
        return cls(kind="exposure", weight=weight)

    @classmethod
    def piecewise_linear(
        cls,
        knots: Sequence[tuple[float, float]],
        over: Sequence[str],
        weight: float = 1.0,
    ) -> "PenaltySpec":
        return cls(
            kind="piecewise_linear_marginal",
            weight=weight,
            knots=tuple((float(x), float(y)) for x, y in knots),
            marginal_over=tuple(over),
        )

    @classmethod
    def step(
        cls,
        pieces: Sequence[tuple[float, float, float, bool, bool]],
        over: Sequence[str],
        weight: float = 1.0,
    ) -> "PenaltySpec":
        return cls(
            kind="step_marginal",
            weight=weight,
            pieces=tuple(
                (float(lo), float(hi), float(v), bool(il), bool(ih))
                for lo, hi, v, il, ih in pieces
            ),
            marginal_over=tuple(over),
        )

    @property
    def is_continuous(self) -> bool:
        return self.kind != "step_marginal"

    def lipschitz_l1(self) -> float | None:
        """Lipschitz constant in the L1 norm on beliefs; None if unbounded."""
        if self.kind == "zero":
            return 0.0
        if self.kind in ("tv_to_prior", "exposure"):
            return float(self.weight)
        if self.kind == "piecewise_linear_marginal":
            slopes = [
                abs(y1 - y0) / (x1 - x0)
                for (x0, y0), (x1, y1) in zip(self.knots, self.knots[1:])
            ]
            return float(self.weight) * (max(slopes) if slopes else 0.0)
        return None  # step_marginal is discontinuous


def validate_spec(spec: PenaltySpec) -> list[str]:
    """Structural checks; returns error messages, empty when clean."""
    errs: list[str] = []
    if spec.kind not in KINDS:
        errs.append(f"unknown penalty kind {spec.kind!r}, expected one of {KINDS}")
        return errs
    if not np.isfinite(spec.weight):
        errs.append("weight must be finite")
    elif spec.weight < 0:
        errs.append(f"weight must be nonnegative, got {spec.weight!r}")
    if spec.kind in MARGINAL_KINDS:
        if not spec.marginal_over:
            errs.append(f"{spec.kind} requires a nonempty marginal_over event")
        elif len(set(spec.marginal_over)) != len(spec.marginal_over):
            errs.append("marginal_over contains duplicate labels")
    if spec.kind == "piecewise_linear_marginal":
        k = spec.knots
        if not k or len(k) < 2:
            errs.append("piecewise_linear_marginal requires at least 2 knots")
        else:
            xs = [x for x, _ in k]
            if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
                errs.append("knot x coordinates must be strictly increasing")
            if xs[0] != 0.0 or xs[-1] != 1.0:
                errs.append("knots must cover [0, 1] (first x == 0, last x == 1)")
            if not all(np.isfinite(x) and np.isfinite(y) for x, y in k):
                errs.append("knots must be finite")
    if spec.kind == "step_marginal":
        if not spec.pieces:
            errs.append("step_marginal requires at least one piece")
        else:
            for j, (lo, hi, v, il, ih) in enumerate(spec.pieces):
                if not (np.isfinite(lo) and np.isfinite(hi) and np.isfinite(v)):
                    errs.append(f"piece {j} has nonfinite numbers")
                    continue
                if not (0.0 <= lo <= hi <= 1.0):
                    errs.append(f"piece {j} bounds must satisfy 0 <= lo <= hi <= 1")
                if lo == hi and not (il and ih):
                    errs.append(f"piece {j} is empty (lo == hi needs closed bounds)")
    return errs


def piecewise_linear_value(knots_x: np.ndarray, knots_y: np.ndarray, x: float) -> float:
    """Evaluate the knot polyline at ``x``, linear on each segment."""
    j = int(np.searchsorted(knots_x, x, side="left")) - 1
    j = min(max(j, 0), len(knots_x) - 2)
    t = (x - knots_x[j]) / (knots_x[j + 1] - knots_x[j])
    return float(knots_y[j] + t * (knots_y[j + 1] - knots_y[j]))


def step_value(pieces, x: float) -> float:
    """First matching piece wins; unmatched x has value 0."""
    for lo, hi, v, il, ih in pieces:
        lo_ok = (x >= lo) if il else (x > lo)
        hi_ok = (x <= hi) if ih else (x < hi)
        if lo_ok and hi_ok:
            return float(v)
    return 0.0


def _event_mass(mu: np.ndarray, event_mask: np.ndarray) -> float:
    return float(mu[event_mask].sum())


def penalty_value(
    spec: PenaltySpec,
    mu,
    prior: np.ndarray | None = None,
    type_index: int | None = None,
    event_mask: np.ndarray | None = None,
) -> float:
    """Evaluate the penalty at belief ``mu``.

    ``prior`` is needed by tv_to_prior, ``type_index`` by exposure, and
    ``event_mask`` (bool array over type labels) by the marginal kinds.
    """
    m = np.asarray(mu, dtype=np.float64)
    if spec.kind == "zero":
        return 0.0
    if spec.kind == "tv_to_prior":
        if prior is None:
            raise ValueError("tv_to_prior needs the prior")
        return spec.weight * 0.5 * float(np.abs(m - np.asarray(prior)).sum())
    if spec.kind == "exposure":
        if type_index is None:
            raise ValueError("exposure needs the type index")
        return spec.weight * float(m[type_index])
    if event_mask is None:
        raise ValueError(f"{spec.kind} needs the event mask")
    x = _event_mass(m, event_mask)
    if spec.kind == "piecewise_linear_marginal":
        kx = np.array([k[0] for k in spec.knots])
        ky = np.array([k[1] for k in spec.knots])
        return spec.weight * piecewise_linear_value(kx, ky, x)
    if spec.kind == "step_marginal":
        return spec.weight * step_value(spec.pieces, x)
    raise ValueError(f"unknown penalty kind {spec.kind!r}")


@dataclass(frozen=True)
class PenaltyRange:
    """Exact range of a penalty over the whole simplex, with witnesses."""

    min: float
    max: float
    argmin: Belief
    argmax: Belief


def _belief_with_marginal(x: float, n: int, event_mask: np.ndarray) -> Belief:
    """A belief putting mass ``x`` on the event; first labels carry it."""
    p = np.zeros(n)
    inside = np.flatnonzero(event_mask)
    outside = np.flatnonzero(~event_mask)
    x = min(max(x, 0.0), 1.0)
    if inside.size == 0:
        p[outside[0]] = 1.0
        return Belief(p)
    if outside.size == 0:
        p[inside[0]] = 1.0
        return Belief(p)
    p[inside[0]] = x
    p[outside[0]] = 1.0 - x
    return Belief(p)


def _marginal_domain(n: int, event_mask: np.ndarray) -> tuple[float, float]:
    """Reachable interval of event mass. Degenerate events pin it."""
    inside = int(event_mask.sum())
    if inside == 0:
        return (0.0, 0.0)
    if inside == n:
        return (1.0, 1.0)
    return (0.0, 1.0)


def penalty_range(
    spec: PenaltySpec,
    n: int,
    prior: np.ndarray | None = None,
    type_index: int | None = None,
    event_mask: np.ndarray | None = None,
) -> PenaltyRange:
    """Closed-form min and max of the penalty over the simplex.

    All catalog kinds admit exact extrema: the distance and exposure
    kinds peak at vertices, the marginal kinds reduce to a scalar
    function of the event mass whose extrema sit at knots or on
    piece-boundary candidates. Witness beliefs attain the values.
    """
    if spec.kind == "zero":
        w = dirac(0, n)
        return PenaltyRange(0.0, 0.0, w, w)
    if spec.kind == "tv_to_prior":
        if prior is None:
            raise ValueError("tv_to_prior needs the prior")
        b = np.asarray(prior, dtype=np.float64)
        lo_idx = int(np.argmin(b))  # ties: lowest index
        hi = spec.weight * (1.0 - float(b[lo_idx]))
        return PenaltyRange(0.0, hi, Belief(b), dirac(lo_idx, n))
    if spec.kind == "exposure":
        if type_index is None:
            raise ValueError("exposure needs the type index")
        if n == 1:
            w = dirac(0, 1)
            return PenaltyRange(float(spec.weight), float(spec.weight), w, w)
        other = 0 if type_index != 0 else 1
        return PenaltyRange(0.0, float(spec.weight), dirac(other, n), dirac(type_index, n))
    if event_mask is None:
        raise ValueError(f"{spec.kind} needs the event mask")
    lo_x, hi_x = _marginal_domain(n, event_mask)
    if spec.kind == "piecewise_linear_marginal":
        kx = np.array([k[0] for k in spec.knots])
        ky = np.array([k[1] for k in spec.knots])
        if lo_x == hi_x:
            candidates = [lo_x]
        else:
            candidates = [float(x) for x in kx]
        vals = [spec.weight * piecewise_linear_value(kx, ky, x) for x in candidates]
    elif spec.kind == "step_marginal":
        if lo_x == hi_x:
            candidates = [lo_x]
        else:
            bounds = sorted({0.0, 1.0} | {p[0] for p in spec.pieces} | {p[1] for p in spec.pieces})
            candidates = list(bounds)
            # a point inside each gap catches the open-interval values
            for b0, b1 in zip(bounds, bounds[1:]):
                if b1 > b0:
                    candidates.append(0.5 * (b0 + b1))
        vals = [spec.weight * step_value(spec.pieces, x) for x in candidates]
    else:
        raise ValueError(f"unknown penalty kind {spec.kind!r}")
    i_min = int(np.argmin(vals))
    i_max = int(np.argmax(vals))
    return PenaltyRange(
        min=float(vals[i_min]),
        max=float(vals[i_max]),
        argmin=_belief_with_marginal(candidates[i_min], n, event_mask),
        argmax=_belief_with_marginal(candidates[i_max], n, event_mask),
    )
