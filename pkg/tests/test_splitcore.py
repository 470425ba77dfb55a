import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regimesplit import (
    DegenerateRegime,
    DomainError,
    EmpiricalDist,
    NotLogConcave,
    SplitResult,
    conditional_levels,
    f_X,
    make_family,
    mk_gap,
    reduced_objective,
    solve_empirical,
    solve_global,
    solve_logconcave,
    sweep,
)
from regimesplit.splitcore import empirical_objective, regime_boundary_convex_1d
from regimesplit.verify import T_STAR, piecewise_fx_closed_form

UNIFORM = make_family("uniform", a=-1.0, b=1.0)
LAPLACE = make_family("laplace")


class TestObjective:
    def test_fx_examples(self, std_normal, two_maxima):
        assert f_X(std_normal, 0.0) == pytest.approx(2 / math.pi, abs=1e-12)
        assert f_X(UNIFORM, 0.0) == pytest.approx(0.25, abs=1e-12)
        assert f_X(two_maxima, 1.0) == pytest.approx(9 / 28, abs=1e-12)

    @given(st.floats(-0.99, 0.99))
    def test_uniform_closed_form(self, t):
        assert f_X(UNIFORM, t) == pytest.approx((1 - t * t) / 4, abs=1e-12)

    def test_fx_is_mean_squared_off_support(self):
        d = make_family("uniform", a=1.0, b=2.0)
        assert f_X(d, 5.0) == pytest.approx(d.mean**2)

    def test_levels(self, std_normal):
        assert conditional_levels(UNIFORM, 0.0) == pytest.approx((-0.5, 0.5), abs=1e-12)
        assert conditional_levels(std_normal, 0.0) == pytest.approx((-math.sqrt(2 / math.pi), math.sqrt(2 / math.pi)))
        assert conditional_levels(LAPLACE, 0.0) == pytest.approx((-1.0, 1.0), abs=1e-10)

    def test_levels_degenerate(self):
        with pytest.raises(DegenerateRegime):
            conditional_levels(UNIFORM, 3.0)

    def test_reduced_objective(self, std_normal):
        assert reduced_objective(UNIFORM, 0.0) == pytest.approx(1 / 12, abs=1e-12)
        assert reduced_objective(std_normal, 0.0) == pytest.approx(1 - 2 / math.pi, abs=1e-10)
        assert reduced_objective(EmpiricalDist.from_samples([-1, 1]), 0.0) == 0.0

    def test_mk_gap(self, std_normal):
        assert mk_gap(std_normal, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert mk_gap(std_normal, 1.0) == pytest.approx(-0.763, abs=1e-3)
        assert mk_gap(LAPLACE, -2.0) > 0

    @given(st.floats(-0.9, 1.5))
    def test_mk_gap_is_derivative_sign(self, t):
        # f_X' = p (beta - alpha) (alpha + beta - 2t)
        d = make_family("weibull", k=2.0)
        a, b = conditional_levels(d, t + 1.0)
        assert mk_gap(d, t + 1.0) == pytest.approx(a + b - 2 * (t + 1.0), abs=1e-9)


class TestLogConcaveSolver:
    @pytest.mark.parametrize("mu, sigma", [(0, 1), (0, 2), (3, 1), (3, 2)])
    def test_gaussian(self, mu, sigma):
        r = solve_logconcave(make_family("gaussian", mu=mu, sigma=sigma))
        c = sigma * math.sqrt(2 / math.pi)
        assert r.threshold == pytest.approx(mu, abs=1e-8)
        assert (r.alpha, r.beta) == pytest.approx((mu - c, mu + c), abs=1e-7)
        assert r.method == "logconcave_bisection"

    def test_laplace(self):
        r = solve_logconcave(LAPLACE)
        assert r.threshold == pytest.approx(0.0, abs=1e-8)
        assert (r.alpha, r.beta) == pytest.approx((-1.0, 1.0), abs=1e-8)
        assert r.objective == pytest.approx(1.0, abs=1e-8)

    def test_rejects_non_log_concave(self, two_maxima):
        with pytest.raises(NotLogConcave):
            solve_logconcave(two_maxima)

    @given(st.floats(1.0, 6.0), st.floats(0.3, 3.0))
    def test_stationary_and_optimal(self, k, scale):
        d = make_family("weibull", k=k, scale=scale)
        r = solve_logconcave(d)
        assert mk_gap(d, r.threshold) == pytest.approx(0.0, abs=1e-8 * scale)
        for dt in (-0.05, 0.05):
            assert f_X(d, r.threshold + dt * scale) <= r.fx_value + 1e-12


class TestGlobalSolver:
    def test_two_maxima(self, two_maxima):
        r = solve_global(two_maxima)
        assert r.thresholds == pytest.approx((-T_STAR, T_STAR), abs=1e-6)
        assert f_X(two_maxima, T_STAR) > f_X(two_maxima, 0.1)
        assert r.fx_value == pytest.approx(piecewise_fx_closed_form(T_STAR), abs=1e-7)

    def test_agrees_with_logconcave(self, std_normal):
        assert solve_global(std_normal).thresholds == pytest.approx((0.0,), abs=1e-8)

    def test_grid_floor(self, std_normal):
        with pytest.raises(DomainError):
            solve_global(std_normal, grid_n=10)


class TestEmpirical:
    def test_two_atoms(self):
        r = solve_empirical(EmpiricalDist.from_samples([-1, 1]))
        assert r.thresholds == (0.0,)
        assert (r.alpha, r.beta, r.objective) == (-1.0, 1.0, 0.0)

    def test_three_atoms(self):
        r = solve_empirical(EmpiricalDist.from_samples([0, 1, 3]))
        assert r.threshold == 2.0
        assert (r.alpha, r.beta) == (0.5, 3.0)
        assert r.objective == pytest.approx(1 / 6)

    def test_symmetric_tie(self):
        r = solve_empirical(EmpiricalDist.from_atoms([(-1, 1), (0, 2), (1, 1)]))
        assert r.thresholds == (-0.5, 0.5)

    def test_single_atom(self):
        with pytest.raises(DomainError):
            solve_empirical(EmpiricalDist.from_samples([2, 2]))

    @given(st.lists(st.integers(-50, 50), min_size=2, max_size=25, unique=True))
    def test_matches_brute_force(self, xs):
        e = EmpiricalDist.from_samples(xs)
        best = min(empirical_objective(e, c) for c in e.values[:-1])
        assert solve_empirical(e).objective == pytest.approx(best, abs=1e-9)


class TestBoundary:
    def test_quadratic(self):
        r = regime_boundary_convex_1d(lambda x: x * x, 0.0, 1.0)
        assert r.kind == "halfline_left"
        assert r.boundary == pytest.approx(0.5, abs=1e-9)

    def test_absolute(self):
        assert regime_boundary_convex_1d(abs, -1.0, 1.0).boundary == pytest.approx(0.0, abs=1e-9)

    def test_quartic(self):
        r = regime_boundary_convex_1d(lambda x: x**4, 0.0, 2.0)
        assert r.boundary == pytest.approx(1.0, abs=1e-9)
        assert r.contains(0.9) and not r.contains(1.1)

    def test_reversed_levels(self):
        r = regime_boundary_convex_1d(lambda x: x * x, 1.0, 0.0)
        assert r.kind == "halfline_right"
        assert r.contains(0.6) and not r.contains(0.4)

    def test_equal_levels(self):
        with pytest.raises(DomainError):
            regime_boundary_convex_1d(abs, 1.0, 1.0)


class TestSweep:
    def test_gaussian_symmetry(self, std_normal):
        fx = sweep(std_normal, -3, 3, 7).fx
        assert len(fx) == 7
        np.testing.assert_allclose(fx, fx[::-1], atol=1e-8)

    def test_uniform(self):
        tab = sweep(UNIFORM, -0.9, 0.9, 19)
        np.testing.assert_allclose(tab.fx, (1 - tab.t**2) / 4, atol=1e-9)

    def test_two_maxima_closed_form(self, two_maxima):
        tab = sweep(two_maxima, -1.95, 1.95, 391)
        expected = [piecewise_fx_closed_form(t) for t in tab.t]
        np.testing.assert_allclose(tab.fx, expected, atol=1e-7)

    def test_threads_preserve_order(self, std_normal):
        assert sweep(std_normal, -2, 2, 9, workers=3).rows == sweep(std_normal, -2, 2, 9).rows

    def test_csv_header(self):
        assert sweep(UNIFORM, -0.5, 0.5, 3).to_csv().splitlines()[0] == "t,fx,mk_gap,cdf"

    @pytest.mark.parametrize("lo, hi, n", [(1, 0, 5), (0, 1, 1)])
    def test_bad_range(self, lo, hi, n):
        with pytest.raises(DomainError):
            sweep(UNIFORM, lo, hi, n)


def test_result_round_trip(two_maxima):
    r = solve_global(two_maxima)
    again = SplitResult.from_dict(json.loads(r.to_json()))
    assert again == r


def test_result_rejects_bad_method():
    with pytest.raises(DomainError):
        SplitResult.from_dict({"thresholds": [0], "alpha": 0, "beta": 1, "objective": 0, "fx_value": 0, "method": "x"})
