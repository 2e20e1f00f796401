"""Numeric kernels for mixed-profile sweeps.

The hot loop of the mixed-strategy search evaluates, for every profile
in a batch, the best deviation gain any type can realize when off-path
perceptions are chosen as favorably as possible for the profile. Two
implementations exist:

- a numba ``@njit`` scalar kernel (used when numba imports cleanly and
  the ``PGAME_NO_NUMBA`` environment variable is unset), and
- a pure-numpy batched fallback.

Both accumulate in the same order (types ascending, then actions
ascending, batch axis vectorized), with ``fastmath`` off, so their
outputs are bit-identical; the test suite asserts exact equality.

Only additive utilities are packed for kernel sweeps. Tabulated games
go through the plain Python evaluator instead.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .model import PerceptionGame
from .penalties import MARGINAL_KINDS

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        # decorator stand-in so the module imports without numba
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


__all__ = [
    "HAVE_NUMBA",
    "active_backend",
    "set_backend",
    "GamePack",
    "pack_game",
    "sweep_profile_gains",
]

_PEN_ZERO = 0
_PEN_TV = 1
_PEN_EXPOSURE = 2
_PEN_POLYLINE = 3
_PEN_STEP = 4

_KIND_CODE = {
    "zero": _PEN_ZERO,
    "tv_to_prior": _PEN_TV,
    "exposure": _PEN_EXPOSURE,
    "piecewise_linear_marginal": _PEN_POLYLINE,
    "step_marginal": _PEN_STEP,
}

# finite stand-in for "no row yet" so both paths share max() semantics
_NEG = -1.7976931348623157e308

_backend_override: str | None = None


def set_backend(name: str | None) -> None:
    """Force 'numba' or 'numpy'; None restores automatic selection."""
    global _backend_override
    if name not in (None, "numba", "numpy"):
        raise ValueError(f"backend must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable in this environment")
    _backend_override = name


def active_backend() -> str:
    if _backend_override is not None:
        return _backend_override
    if os.environ.get("PGAME_NO_NUMBA"):
        return "numpy"
    return "numba" if HAVE_NUMBA else "numpy"


@dataclass
class GamePack:
    """Dense-array image of an additive game, ready for the kernels."""

    prior: np.ndarray  # (n,)
    v: np.ndarray  # (n, m)
    pen_kind: np.ndarray  # (n,) int64 codes
    pen_weight: np.ndarray  # (n,)
    event: np.ndarray  # (n, n) 0/1, row per type
    knots_x: np.ndarray  # (n, K) padded
    knots_y: np.ndarray  # (n, K)
    knot_count: np.ndarray  # (n,) int64
    pieces: np.ndarray  # (n, P, 5) rows (lo, hi, value, inc_lo, inc_hi)
    piece_count: np.ndarray  # (n,) int64
    u_min: np.ndarray  # (n, m)
    u_max: np.ndarray  # (n, m)


def pack_game(game: PerceptionGame) -> GamePack:
    if game.utility.kind != "additive_separable":
        raise ValueError("kernel sweeps support additive utilities only")
    n, m = game.n, game.m
    pen_kind = np.zeros(n, dtype=np.int64)
    pen_weight = np.zeros(n)
    event = np.zeros((n, n))
    max_knots = 2
    max_pieces = 1
    for t in range(n):
        spec = game.penalty_of(t)
        if spec.knots:
            max_knots = max(max_knots, len(spec.knots))
        if spec.pieces:
            max_pieces = max(max_pieces, len(spec.pieces))
    knots_x = np.zeros((n, max_knots))
    knots_y = np.zeros((n, max_knots))
    knot_count = np.zeros(n, dtype=np.int64)
    pieces = np.zeros((n, max_pieces, 5))
    piece_count = np.zeros(n, dtype=np.int64)
    for t in range(n):
        spec = game.penalty_of(t)
        pen_kind[t] = _KIND_CODE[spec.kind]
        pen_weight[t] = spec.weight
        if spec.kind in MARGINAL_KINDS:
            event[t, game.mask_of(t)] = 1.0
        if spec.knots:
            cnt = len(spec.knots)
            knot_count[t] = cnt
            for j, (x, y) in enumerate(spec.knots):
                knots_x[t, j] = x
                knots_y[t, j] = y
        if spec.pieces:
            cnt = len(spec.pieces)
            piece_count[t] = cnt
            for j, (lo, hi, val, il, ih) in enumerate(spec.pieces):
                pieces[t, j] = (lo, hi, val, 1.0 if il else 0.0, 1.0 if ih else 0.0)
    u_min, u_max = game.utility_bounds()
    return GamePack(
        prior=np.ascontiguousarray(game.prior.p, dtype=np.float64),
        v=np.ascontiguousarray(game.utility.v, dtype=np.float64),
        pen_kind=pen_kind,
        pen_weight=pen_weight,
        event=event,
        knots_x=knots_x,
        knots_y=knots_y,
        knot_count=knot_count,
        pieces=pieces,
        piece_count=piece_count,
        u_min=np.ascontiguousarray(u_min),
        u_max=np.ascontiguousarray(u_max),
    )


@njit(cache=True)
def _bisect_left(arr, cnt, x):
    lo = 0
    hi = cnt
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _penalty_scalar(t, post, prior, pen_kind, pen_weight, event, knots_x, knots_y, knot_count, pieces, piece_count):
    kind = pen_kind[t]
    if kind == 0:
        return 0.0
    w = pen_weight[t]
    if kind == 1:
        acc = 0.0
        for s in range(prior.shape[0]):
            acc = acc + abs(post[s] - prior[s])
        return w * 0.5 * acc
    if kind == 2:
        return w * post[t]
    x = 0.0
    for s in range(prior.shape[0]):
        x = x + event[t, s] * post[s]
    if kind == 3:
        cnt = knot_count[t]
        j = _bisect_left(knots_x[t], cnt, x) - 1
        if j < 0:
            j = 0
        if j > cnt - 2:
            j = cnt - 2
        frac = (x - knots_x[t, j]) / (knots_x[t, j + 1] - knots_x[t, j])
        return w * (knots_y[t, j] + frac * (knots_y[t, j + 1] - knots_y[t, j]))
    # step: first matching piece wins, unmatched x is 0
    val = 0.0
    for p in range(piece_count[t]):
        lo = pieces[t, p, 0]
        hi = pieces[t, p, 1]
        lo_ok = x >= lo if pieces[t, p, 3] == 1.0 else x > lo
        hi_ok = x <= hi if pieces[t, p, 4] == 1.0 else x < hi
        if lo_ok and hi_ok:
            val = pieces[t, p, 2]
            break
    return w * val


@njit(cache=True)
def _gains_numba(idx, grid_pts, prior, v, pen_kind, pen_weight, event, knots_x, knots_y, knot_count, pieces, piece_count, u_min, u_max):
    B = idx.shape[0]
    G = grid_pts.shape[0]
    m = grid_pts.shape[1]
    n = prior.shape[0]
    gains = np.empty(B)
    sig = np.empty((n, m))
    pa = np.empty(m)
    post = np.empty(n)
    rows = np.empty((n, m))
    free = np.empty((n, m), dtype=np.bool_)
    for b in range(B):
        code = idx[b]
        for t in range(n - 1, -1, -1):
            g = code % G
            code = code // G
            for a in range(m):
                sig[t, a] = grid_pts[g, a]
        for a in range(m):
            acc = 0.0
            for t in range(n):
                acc = acc + prior[t] * sig[t, a]
            pa[a] = acc
        for a in range(m):
            if pa[a] > 0.0:
                for s in range(n):
                    post[s] = prior[s] * sig[s, a] / pa[a]
                for t in range(n):
                    pen = _penalty_scalar(
                        t, post, prior, pen_kind, pen_weight, event,
                        knots_x, knots_y, knot_count, pieces, piece_count,
                    )
                    rows[t, a] = v[t, a] - pen
                    free[t, a] = False
            else:
                for t in range(n):
                    if sig[t, a] > 0.0:
                        free[t, a] = True
                        rows[t, a] = 0.0
                    else:
                        free[t, a] = False
                        rows[t, a] = u_min[t, a]
        worst = _NEG
        for t in range(n):
            has_free = False
            m0 = _NEG
            free_lo = _NEG
            for a in range(m):
                if free[t, a]:
                    has_free = True
                    if u_min[t, a] > free_lo:
                        free_lo = u_min[t, a]
                elif rows[t, a] > m0:
                    m0 = rows[t, a]
            if has_free:
                cap = m0 if m0 > free_lo else free_lo
                for a in range(m):
                    if free[t, a]:
                        rows[t, a] = u_max[t, a] if u_max[t, a] < cap else cap
            played = 0.0
            best = _NEG
            for a in range(m):
                played = played + sig[t, a] * rows[t, a]
                if rows[t, a] > best:
                    best = rows[t, a]
            gain = best - played
            if gain > worst:
                worst = gain
        gains[b] = worst
    return gains


def _penalty_batch(pack: GamePack, t: int, post: np.ndarray) -> np.ndarray:
    """Penalty of type ``t`` at each posterior in ``post`` (B, n)."""
    kind = int(pack.pen_kind[t])
    w = float(pack.pen_weight[t])
    n = pack.prior.shape[0]
    B = post.shape[0]
    if kind == _PEN_ZERO:
        return np.zeros(B)
    if kind == _PEN_TV:
        acc = np.zeros(B)
        for s in range(n):
            acc = acc + np.abs(post[:, s] - pack.prior[s])
        return w * 0.5 * acc
    if kind == _PEN_EXPOSURE:
        return w * post[:, t]
    x = np.zeros(B)
    for s in range(n):
        x = x + pack.event[t, s] * post[:, s]
    if kind == _PEN_POLYLINE:
        cnt = int(pack.knot_count[t])
        kx = pack.knots_x[t, :cnt]
        ky = pack.knots_y[t, :cnt]
        j = np.clip(np.searchsorted(kx, x, side="left") - 1, 0, cnt - 2)
        frac = (x - kx[j]) / (kx[j + 1] - kx[j])
        return w * (ky[j] + frac * (ky[j + 1] - ky[j]))
    cnt = int(pack.piece_count[t])
    val = np.zeros(B)
    assigned = np.zeros(B, dtype=bool)
    for p in range(cnt):
        lo, hi, pv, il, ih = pack.pieces[t, p]
        lo_ok = (x >= lo) if il == 1.0 else (x > lo)
        hi_ok = (x <= hi) if ih == 1.0 else (x < hi)
        match = lo_ok & hi_ok & ~assigned
        val[match] = pv
        assigned |= match
    return w * val


def _gains_numpy(idx: np.ndarray, grid_pts: np.ndarray, pack: GamePack) -> np.ndarray:
    B = idx.shape[0]
    G = grid_pts.shape[0]
    n = pack.prior.shape[0]
    m = grid_pts.shape[1]
    digits = np.empty((B, n), dtype=np.int64)
    code = idx.copy()
    for t in range(n - 1, -1, -1):
        digits[:, t] = code % G
        code //= G
    sig = grid_pts[digits]  # (B, n, m)
    pa = np.zeros((B, m))
    for t in range(n):
        pa = pa + pack.prior[t] * sig[:, t, :]
    on = pa > 0.0
    denom = np.where(on, pa, 1.0)
    post = pack.prior[None, :, None] * sig / denom[:, None, :]  # (B, n, m)
    rows = np.empty((B, n, m))
    for t in range(n):
        pen = np.empty((B, m))
        for a in range(m):
            pen[:, a] = _penalty_batch(pack, t, post[:, :, a])
        rows[:, t, :] = pack.v[t] - pen
    free = (~on[:, None, :]) & (sig > 0.0)
    pinned = np.where(on[:, None, :], rows, pack.u_min[None, :, :])
    m0 = np.where(free, _NEG, pinned).max(axis=2)
    free_lo = np.where(free, pack.u_min[None, :, :], _NEG).max(axis=2)
    cap = np.maximum(m0, free_lo)
    rows = np.where(
        free,
        np.minimum(pack.u_max[None, :, :], cap[:, :, None]),
        pinned,
    )
    played = np.zeros((B, n))
    for a in range(m):
        played = played + sig[:, :, a] * rows[:, :, a]
    best = rows.max(axis=2)
    return (best - played).max(axis=1)


def sweep_profile_gains(
    pack: GamePack,
    grid_pts: np.ndarray,
    idx: np.ndarray,
    backend: str | None = None,
    chunk: int = 8192,
) -> np.ndarray:
    """Best deviation gain per profile index, under favorable off-path
    perceptions. A gain within tolerance of zero means the profile can
    be completed into an equilibrium.
    """
    which = backend or active_backend()
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    grid_pts = np.ascontiguousarray(grid_pts, dtype=np.float64)
    if which == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _gains_numba(
            idx, grid_pts, pack.prior, pack.v, pack.pen_kind, pack.pen_weight,
            pack.event, pack.knots_x, pack.knots_y, pack.knot_count,
            pack.pieces, pack.piece_count, pack.u_min, pack.u_max,
        )
    out = np.empty(idx.shape[0])
    for start in range(0, idx.shape[0], chunk):
        stop = min(start + chunk, idx.shape[0])
        out[start:stop] = _gains_numpy(idx[start:stop], grid_pts, pack)
    return out
