"""Independent reference computations for agreement tests.

Everything here is written against raw arrays on purpose: no imports
from the package's penalty or solver modules, so a bug there cannot
cancel out of both sides of a comparison. Where a test needs exact
tie agreement (pooling), the closed forms below use the same
arithmetic expressions the package derives, written out directly.
"""

from __future__ import annotations

import numpy as np


# --- penalty evaluation, reimplemented -------------------------------


def pen_value(pen: dict, mu: np.ndarray, prior: np.ndarray, t: int) -> float:
    kind = pen["kind"]
    if kind == "zero":
        return 0.0
    if kind == "tv_to_prior":
        return pen["weight"] * 0.5 * float(np.abs(np.asarray(mu) - prior).sum())
    if kind == "exposure":
        return pen["weight"] * float(mu[t])
    x = float(np.asarray(mu)[pen["mask"]].sum())
    if kind == "piecewise_linear_marginal":
        xs = np.array([k[0] for k in pen["knots"]])
        ys = np.array([k[1] for k in pen["knots"]])
        return pen["weight"] * float(np.interp(x, xs, ys))
    if kind == "step_marginal":
        for lo, hi, val, il, ih in pen["pieces"]:
            if (x >= lo if il else x > lo) and (x <= hi if ih else x < hi):
                return pen["weight"] * float(val)
        return 0.0
    raise ValueError(kind)


def pen_bounds(pen: dict, prior: np.ndarray, n: int) -> tuple[float, float]:
    """(min, max) of the penalty over the belief simplex."""
    kind = pen["kind"]
    if kind == "zero":
        return 0.0, 0.0
    if kind == "tv_to_prior":
        return 0.0, pen["weight"] * (1.0 - float(prior.min()))
    if kind == "exposure":
        if n == 1:
            return float(pen["weight"]), float(pen["weight"])
        return 0.0, float(pen["weight"])
    inside = int(pen["mask"].sum())
    if inside == 0:
        xs = [0.0]
    elif inside == n:
        xs = [1.0]
    elif kind == "piecewise_linear_marginal":
        xs = [k[0] for k in pen["knots"]]
    else:
        cuts = sorted({0.0, 1.0} | {p[0] for p in pen["pieces"]} | {p[1] for p in pen["pieces"]})
        xs = list(cuts) + [0.5 * (a + b) for a, b in zip(cuts, cuts[1:]) if b > a]
    vals = []
    for x in xs:
        mu = np.zeros(n)
        ins = np.flatnonzero(pen["mask"])
        outs = np.flatnonzero(~pen["mask"])
        if ins.size and outs.size:
            mu[ins[0]] = x
            mu[outs[0]] = 1.0 - x
        elif ins.size:
            mu[ins[0]] = 1.0
        else:
            mu[outs[0]] = 1.0
        vals.append(pen_value(pen, mu, prior, 0))
    return float(min(vals)), float(max(vals))


def spec_to_dict(spec, labels: tuple[str, ...]) -> dict:
    """Flatten a package PenaltySpec into the raw dict used here."""
    out = {"kind": spec.kind, "weight": float(spec.weight)}
    if spec.knots is not None:
        out["knots"] = [(float(x), float(y)) for x, y in spec.knots]
    if spec.pieces is not None:
        out["pieces"] = [tuple(p) for p in spec.pieces]
    if spec.marginal_over is not None:
        out["mask"] = np.array([lab in spec.marginal_over for lab in labels])
    return out


# --- full pooling, brute force ---------------------------------------


def oracle_pooling_tv_upper(prior, v, weights, tol=1e-9):
    """Pooling actions under leakage penalties, best-vs-worst test.

    Action a works for type t when its best-case value beats every
    rival's worst case: v[t,a] >= v[t,a2] - weights[t]*(1 - min prior).
    """
    n, m = v.shape
    sets = []
    for t in range(n):
        wmax = weights[t] * (1.0 - float(prior.min()))
        members = []
        for a in range(m):
            if all(v[t, a] >= v[t, a2] - wmax - tol for a2 in range(m)):
                members.append(a)
        sets.append(members)
    common = set(sets[0])
    for s in sets[1:]:
        common &= set(s)
    return sorted(common), sets


def oracle_pooling_exposure_lower(prior, v, weights, tol=1e-9):
    """Pooling actions under exposure penalties, prior-vs-revealed test.

    Action a works for type t when staying hidden beats every rival
    action taken while fully found out:
    v[t,a] - weights[t]*prior[t] >= v[t,a2] - weights[t].
    """
    n, m = v.shape
    sets = []
    for t in range(n):
        members = []
        for a in range(m):
            lhs = v[t, a] - weights[t] * float(prior[t])
            if all(lhs >= v[t, a2] - weights[t] * 1.0 - tol for a2 in range(m)):
                members.append(a)
        sets.append(members)
    common = set(sets[0])
    for s in sets[1:]:
        common &= set(s)
    return sorted(common), sets


# --- pure-profile equilibrium gains, brute force ---------------------


def oracle_pure_gains(prior, v, pens, actions, tol=1e-9):
    """Best-deviation gain per type for a pure profile, favorable
    perceptions. Requires every prior entry positive (no free rows)."""
    prior = np.asarray(prior, dtype=np.float64)
    assert (prior > 0).all(), "oracle assumes positive priors"
    n, m = v.shape
    pa = np.zeros(m)
    for t in range(n):
        pa[actions[t]] += prior[t]
    rows = np.empty((n, m))
    for a in range(m):
        if pa[a] > 0:
            post = np.array([prior[t] if actions[t] == a else 0.0 for t in range(n)]) / pa[a]
            for t in range(n):
                rows[t, a] = v[t, a] - pen_value(pens[t], post, prior, t)
        else:
            for t in range(n):
                rows[t, a] = v[t, a] - pen_bounds(pens[t], prior, n)[1]
    gains = np.empty(n)
    for t in range(n):
        gains[t] = rows[t].max() - rows[t, actions[t]]
    return gains
