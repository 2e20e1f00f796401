"""Random instance generators.

Used by the test suite's agreement sweeps; importable by users who
want quick fuzzing. All priors are dyadic (multiples of 1/64, every
type at least 1/64), so posteriors stay exactly representable more
often and no generated type ever has zero mass.
"""

from __future__ import annotations

import numpy as np

from .experiments import SeparableGameSpec, check_separation_margin
from .model import ActionSpace, PerceptionGame, TypeSpace, UtilityModel
from .penalties import PenaltySpec
from .simplex import Belief

__all__ = [
    "dyadic_prior",
    "random_additive_game",
    "random_mixed_catalog_game",
    "random_separable_spec",
]


def dyadic_prior(rng: np.random.Generator, n: int, denom: int = 64) -> np.ndarray:
    if n > denom:
        raise ValueError(f"cannot split {denom} cells over {n} types")
    counts = rng.multinomial(denom - n, np.full(n, 1.0 / n)) + 1
    return counts / float(denom)


def _labels(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(n))


def random_additive_game(rng: np.random.Generator, kind: str) -> PerceptionGame:
    """2-3 types, 2-4 actions, values in [0, 5], weights in [0, 3].

    ``kind`` is 'tv_to_prior' (every type dislikes leakage, an upper
    privacy game) or 'exposure' (every type dislikes being found out,
    a lower privacy game).
    """
    if kind not in ("tv_to_prior", "exposure"):
        raise ValueError(f"kind must be 'tv_to_prior' or 'exposure', got {kind!r}")
    n = int(rng.integers(2, 4))
    m = int(rng.integers(2, 5))
    v = rng.uniform(0.0, 5.0, size=(n, m))
    make = PenaltySpec.tv_to_prior if kind == "tv_to_prior" else PenaltySpec.exposure
    penalties = tuple(make(float(rng.uniform(0.0, 3.0))) for _ in range(n))
    return PerceptionGame(
        types=TypeSpace.plain(_labels("t", n)),
        actions=ActionSpace.plain(_labels("a", m)),
        prior=Belief(dyadic_prior(rng, n)),
        utility=UtilityModel(kind="additive_separable", v=v, penalties=penalties),
    )


def _random_event(rng: np.random.Generator, labels: tuple[str, ...]) -> tuple[str, ...]:
    """Nonempty proper subset (every label, when only one exists)."""
    n = len(labels)
    if n == 1:
        return labels
    while True:
        mask = rng.random(n) < 0.5
        if 0 < mask.sum() < n:
            return tuple(lab for lab, m in zip(labels, mask) if m)


def _random_penalty(rng: np.random.Generator, labels: tuple[str, ...]) -> PenaltySpec:
    roll = rng.random()
    if roll < 0.15:
        return PenaltySpec.zero()
    if roll < 0.40:
        return PenaltySpec.tv_to_prior(float(rng.uniform(0.0, 3.0)))
    if roll < 0.60:
        return PenaltySpec.exposure(float(rng.uniform(0.0, 3.0)))
    if roll < 0.85:
        x1 = float(rng.uniform(0.2, 0.8))
        ys = rng.uniform(0.0, 2.0, size=3)
        return PenaltySpec.piecewise_linear(
            knots=((0.0, float(ys[0])), (x1, float(ys[1])), (1.0, float(ys[2]))),
            over=_random_event(rng, labels),
            weight=float(rng.uniform(0.0, 2.0)),
        )
    cuts = np.sort(rng.uniform(0.0, 1.0, size=2))
    piece = (float(cuts[0]), float(cuts[1]), float(rng.uniform(0.0, 2.0)),
             bool(rng.integers(2)), bool(rng.integers(2)))
    return PenaltySpec.step(
        pieces=(piece,),
        over=_random_event(rng, labels),
        weight=float(rng.uniform(0.0, 2.0)),
    )


def random_mixed_catalog_game(rng: np.random.Generator) -> PerceptionGame:
    """Every penalty kind in play, independently drawn per type."""
    n = int(rng.integers(2, 4))
    m = int(rng.integers(2, 5))
    labels = _labels("t", n)
    penalties = tuple(_random_penalty(rng, labels) for _ in range(n))
    return PerceptionGame(
        types=TypeSpace.plain(labels),
        actions=ActionSpace.plain(_labels("a", m)),
        prior=Belief(dyadic_prior(rng, n)),
        utility=UtilityModel(
            kind="additive_separable",
            v=rng.uniform(0.0, 5.0, size=(n, m)),
            penalties=penalties,
        ),
        allow_discontinuous=any(not p.is_continuous for p in penalties),
    )


def _separable_penalty(rng: np.random.Generator, outcomes: tuple[str, ...]) -> PenaltySpec:
    roll = rng.random()
    if roll < 0.3:
        return PenaltySpec.zero()
    event = _random_event(rng, outcomes)
    weight = float(rng.uniform(0.0, 1.2))
    if roll < 0.8:
        x1 = float(rng.uniform(0.2, 0.8))
        ys = rng.uniform(0.0, 1.0, size=3)
        return PenaltySpec.piecewise_linear(
            knots=((0.0, float(ys[0])), (x1, float(ys[1])), (1.0, float(ys[2]))),
            over=event,
            weight=weight,
        )
    cuts = np.sort(rng.uniform(0.0, 1.0, size=2))
    piece = (float(cuts[0]), float(cuts[1]), float(rng.uniform(0.0, 1.0)), True, True)
    return PenaltySpec.step(pieces=(piece,), over=event, weight=weight)


def random_separable_spec(
    rng: np.random.Generator, max_tries: int = 500
) -> SeparableGameSpec:
    """A factored spec whose separation margin check passes.

    Own-outcome action values dominate by at least 1 while penalty
    spreads usually stay below that; the occasional draw that breaks
    the margin is rejected and redrawn.
    """
    for _ in range(max_tries):
        n_o = int(rng.integers(2, 4))
        n_p = int(rng.integers(1, 3))
        m = n_o + (1 if rng.random() < 0.3 else 0)
        outcomes = _labels("o", n_o)
        privacy = _labels("p", n_p)
        v = rng.uniform(0.0, 1.5, size=(n_o, m))
        for o in range(n_o):
            v[o, o] = rng.uniform(2.5, 5.0)
        counts = rng.multinomial(64 - n_o * n_p, np.full(n_o * n_p, 1.0 / (n_o * n_p))) + 1
        joint = counts.reshape(n_o, n_p) / 64.0
        spec = SeparableGameSpec(
            outcomes=outcomes,
            privacy=privacy,
            actions=_labels("a", m),
            joint_prior=joint,
            v_outcome=v,
            penalty_by_privacy={p: _separable_penalty(rng, outcomes) for p in privacy},
        )
        if check_separation_margin(spec).holds:
            return spec
    raise RuntimeError(f"no margin-passing spec found in {max_tries} tries")
