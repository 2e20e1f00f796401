#!/usr/bin/env python3
"""Benchmark the profile-gain sweep kernel: numba vs numpy backends.

Builds a 3-type, 3-action additive game whose penalty catalog touches
every kernel branch (total variation, exposure, polyline, step), then
times sweep_profile_gains in two regimes:

  * batch-size sweep at a fixed grid, showing per-call latency (the
    jit path skips the numpy path's temporary allocations, so it wins
    when batches are small);
  * resolution sweep at a large fixed batch, showing bulk throughput.

Outputs from the two backends are checked for exact (bitwise)
agreement before any timing is reported.

Run from the repository root after installing the package:

    python3 benchmarks/bench_kernels.py
"""

import os
import time

import numpy as np

from perception_games.kernels import HAVE_NUMBA, pack_game, sweep_profile_gains
from perception_games.model import (
    ActionSpace,
    Belief,
    PenaltySpec,
    PerceptionGame,
    TypeSpace,
    UtilityModel,
)
from perception_games.simplex import SimplexGrid


def build_game() -> PerceptionGame:
    """Fixed mid-size game; one penalty of each nontrivial kind."""
    v = np.array([
        [3.0, 1.0, 0.0],
        [0.5, 2.5, 1.5],
        [1.0, 0.0, 3.5],
    ])
    penalties = (
        PenaltySpec.tv_to_prior(1.5),
        PenaltySpec.piecewise_linear(
            knots=((0.0, 1.0), (0.4, 0.0), (1.0, 2.0)),
            over=("t0", "t1"),
            weight=1.2,
        ),
        PenaltySpec.step(
            pieces=((0.3, 0.8, 1.0, True, False),),
            over=("t2",),
            weight=2.0,
        ),
    )
    return PerceptionGame(
        types=TypeSpace.plain(("t0", "t1", "t2")),
        actions=ActionSpace.plain(("a0", "a1", "a2")),
        prior=Belief(np.array([0.5, 0.25, 0.25])),
        utility=UtilityModel(kind="additive_separable", v=v, penalties=penalties),
    )


def time_backend(pack, pts, idx, backend: str, n_runs: int) -> tuple[float, np.ndarray]:
    """Best wall-clock seconds over n_runs, plus the output array."""
    out = sweep_profile_gains(pack, pts, idx, backend=backend)
    best = float("inf")
    for _ in range(n_runs):
        t0 = time.perf_counter()
        out = sweep_profile_gains(pack, pts, idx, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def compare(pack, pts, idx, n_runs: int, use_numba: bool) -> str:
    t_np, out_np = time_backend(pack, pts, idx, "numpy", n_runs)
    cells = f"{t_np * 1e6:>14.1f}"
    if use_numba:
        t_nb, out_nb = time_backend(pack, pts, idx, "numba", n_runs)
        if not np.array_equal(out_np, out_nb):
            raise SystemExit("backend outputs disagree; kernel bug")
        ratio = t_np / t_nb
        cells += f"{t_nb * 1e6:>14.1f}{ratio:>12.2f}"
    return cells


def main() -> None:
    use_numba = HAVE_NUMBA and not os.environ.get("PGAME_NO_NUMBA")

    print("sweep_profile_gains backend benchmark")
    print("=" * 64)
    if not use_numba:
        reason = "PGAME_NO_NUMBA set" if HAVE_NUMBA else "numba not importable"
        print(f"numba path disabled ({reason}); timing numpy only")

    game = build_game()
    pack = pack_game(game)
    rng = np.random.default_rng(0)

    if use_numba:
        # first call pays JIT compilation; keep it out of the timings
        warm_pts = SimplexGrid(game.m, 2).points()
        warm_idx = np.arange(warm_pts.shape[0] ** game.n, dtype=np.int64)
        t0 = time.perf_counter()
        sweep_profile_gains(pack, warm_pts, warm_idx, backend="numba")
        print(f"numba warmup (JIT compile): {time.perf_counter() - t0:.2f}s")

    tail = f"{'numba (us)':>14}{'np/nb':>12}" if use_numba else ""

    print()
    print("batch-size sweep, resolution 16 grid")
    header = f"{'profiles':<10}{'numpy (us)':>14}" + tail
    print(header)
    print("-" * len(header))
    pts = SimplexGrid(game.m, 16).points()
    total = pts.shape[0] ** game.n
    for take in (64, 512, 4096, 32768):
        idx = rng.choice(total, size=take, replace=False).astype(np.int64)
        print(f"{take:<10}" + compare(pack, pts, idx, n_runs=5, use_numba=use_numba))

    print()
    print("resolution sweep, 200000-profile batch")
    header = f"{'resolution':<10}{'numpy (us)':>14}" + tail
    print(header)
    print("-" * len(header))
    for resolution in (8, 16, 24):
        pts = SimplexGrid(game.m, resolution).points()
        total = pts.shape[0] ** game.n
        take = min(total, 200_000)
        idx = rng.choice(total, size=take, replace=False).astype(np.int64)
        print(f"{resolution:<10}" + compare(pack, pts, idx, n_runs=3, use_numba=use_numba))

    if use_numba:
        print()
        print("outputs matched bitwise in every row")


if __name__ == "__main__":
    main()
