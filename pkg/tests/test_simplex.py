import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perception_games.simplex import (
    Belief,
    SimplexGrid,
    default_resolution,
    dirac,
    optimize_over_simplex,
    tv_distance,
    uniform,
)


class TestBelief:
    def test_accepts_and_freezes(self):
        b = Belief([0.25, 0.75])
        assert b.n == 2
        assert b.p.flags.writeable is False
        assert float(b.p.sum()) == 1.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Belief([-0.2, 1.2])

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            Belief([0.5, 0.4])

    def test_clips_tiny_negative(self):
        b = Belief([1.0, -1e-15])
        assert b.p[1] == 0.0

    def test_rejects_empty_and_matrix(self):
        with pytest.raises(ValueError):
            Belief([])
        with pytest.raises(ValueError):
            Belief([[0.5, 0.5]])

    def test_equality_is_exact(self):
        assert Belief([0.5, 0.5]) == Belief([0.5, 0.5])
        assert Belief([0.5, 0.5]) != Belief([0.5 + 1e-12, 0.5 - 1e-12])
        assert Belief([0.5, 0.5]).isclose(Belief([0.5 + 1e-12, 0.5 - 1e-12]))

    def test_dirac_and_uniform(self):
        assert dirac(1, 3) == Belief([0.0, 1.0, 0.0])
        assert uniform(4) == Belief([0.25] * 4)


class TestTvDistance:
    def test_known_values(self):
        assert tv_distance(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
        assert tv_distance(np.array([0.5, 0.5]), np.array([0.5, 0.5])) == 0.0
        assert tv_distance(np.array([0.75, 0.25]), np.array([0.25, 0.75])) == pytest.approx(0.5)

    @given(
        st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5),
        st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5),
    )
    def test_metric_properties(self, xs, ys):
        n = min(len(xs), len(ys))
        p = np.array(xs[:n]) / sum(xs[:n])
        q = np.array(ys[:n]) / sum(ys[:n])
        d = tv_distance(p, q)
        assert 0.0 <= d <= 1.0 + 1e-12
        assert d == pytest.approx(tv_distance(q, p))
        assert tv_distance(p, p) == 0.0


class TestSimplexGrid:
    @pytest.mark.parametrize("n,k", [(1, 5), (2, 7), (3, 6), (4, 5)])
    def test_count_formula(self, n, k):
        grid = SimplexGrid(n, k)
        expected = math.comb(k + n - 1, n - 1)
        assert len(grid) == expected
        assert grid.points().shape == (expected, n)

    def test_compositions_are_lexicographic(self):
        grid = SimplexGrid(3, 3)
        comps = list(grid.compositions())
        assert comps[0] == (0, 0, 3)
        assert comps[-1] == (3, 0, 0)
        assert comps == sorted(comps)
        assert all(sum(c) == 3 for c in comps)

    def test_points_are_distributions(self):
        pts = SimplexGrid(3, 8).points()
        assert np.all(pts >= 0)
        np.testing.assert_allclose(pts.sum(axis=1), 1.0, atol=1e-12)
        assert pts.flags.writeable is False

    def test_covering_radius(self):
        assert SimplexGrid(3, 10).covering_radius_l1() == pytest.approx(0.2)

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            SimplexGrid(2, 0)
        with pytest.raises(ValueError):
            SimplexGrid(0, 5)


class TestDefaultResolution:
    def test_by_dimension(self):
        assert default_resolution(1) == 1
        assert default_resolution(2) == 200
        assert default_resolution(3) == 60
        assert default_resolution(4) == 24
        assert default_resolution(7) == 24

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("PGAME_GRID", "17")
        assert default_resolution(2) == 17
        assert default_resolution(5) == 17

    def test_env_override_invalid_raises(self, monkeypatch):
        monkeypatch.setenv("PGAME_GRID", "zero")
        with pytest.raises(ValueError):
            default_resolution(2)
        monkeypatch.setenv("PGAME_GRID", "0")
        with pytest.raises(ValueError):
            default_resolution(2)


class TestOptimizeOverSimplex:
    def test_linear_max_at_vertex(self):
        c = np.array([0.3, 1.7, -0.5])
        res = optimize_over_simplex(lambda mu: float(c @ mu), 3, mode="max", resolution=10)
        assert res.value == pytest.approx(1.7)
        assert res.point == dirac(1, 3)

    def test_linear_min_at_vertex(self):
        c = np.array([0.3, 1.7, -0.5])
        res = optimize_over_simplex(lambda mu: float(c @ mu), 3, mode="min", resolution=10)
        assert res.value == pytest.approx(-0.5)
        assert res.point == dirac(2, 3)

    def test_error_bound_uses_lipschitz(self):
        res = optimize_over_simplex(lambda mu: 0.0, 2, resolution=50, lipschitz_l1=3.0)
        assert res.error_bound == pytest.approx(3.0 * 2.0 / 50.0)
        assert res.resolution == 50

    def test_error_bound_none_without_lipschitz(self):
        res = optimize_over_simplex(lambda mu: 0.0, 2, resolution=10)
        assert res.error_bound is None

    def test_tie_takes_first_grid_point(self):
        res = optimize_over_simplex(lambda mu: 1.0, 2, mode="max", resolution=4)
        first = SimplexGrid(2, 4).points()[0]
        np.testing.assert_array_equal(np.asarray(res.point), first)

    def test_rejects_bad_mode(self):
        with pytest.raises(ValueError):
            optimize_over_simplex(lambda mu: 0.0, 2, mode="sup", resolution=4)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_grid_value_within_bound_of_true_max(self, seed):
        rng = np.random.default_rng(seed)
        c = rng.uniform(-2.0, 2.0, size=3)
        lip = float(np.abs(c).max())  # |c . (mu - nu)| <= max|c| * ||mu - nu||_1
        res = optimize_over_simplex(
            lambda mu: float(c @ mu), 3, mode="max", resolution=12, lipschitz_l1=lip
        )
        true = float(c.max())
        assert res.value <= true + 1e-12
        assert true <= res.value + res.error_bound + 1e-12
