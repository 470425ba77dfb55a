import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regimesplit import ConvexPotential, DegenerateRegime, DomainError, NonIntegrable, check_lemma, make_family
from regimesplit.inequality import (
    inactivity_time,
    lemma_sides,
    monotonicity_probe,
    random_convex_potential,
    residual_life,
    translated_potential,
)


class TestPotential:
    def test_affine_equality(self):
        assert lemma_sides(ConvexPotential.affine(1.0)) == pytest.approx((1.0, 1.0), abs=1e-14)

    def test_quadratic(self):
        lhs, rhs = lemma_sides(ConvexPotential.from_function(lambda y: y * y))
        assert lhs == pytest.approx(0.5, abs=1e-9)
        assert rhs == pytest.approx(math.pi / 4, abs=1e-9)
        assert check_lemma(ConvexPotential.from_function(lambda y: y * y)).slack == pytest.approx(math.pi / 4 - 0.5, abs=1e-9)

    def test_shifted_affine(self):
        lhs, rhs = lemma_sides(ConvexPotential.affine(1.0, 2.0))
        assert lhs == pytest.approx(math.exp(-4), rel=1e-12)
        assert rhs == pytest.approx(math.exp(-4), rel=1e-12)

    def test_equality_within_tight_tol(self):
        rep = check_lemma(ConvexPotential.affine(1.0), tol=1e-10)
        assert rep.holds and abs(rep.slack) < 1e-10

    def test_piecewise_matches_quadrature(self):
        V = ConvexPotential.piecewise([0, 1, 2.5], [-1.0, 0.5, 2.0], v0=0.3)
        W = ConvexPotential.from_function(V)
        assert lemma_sides(V) == pytest.approx(lemma_sides(W), rel=1e-9)

    @pytest.mark.parametrize(
        "knots, slopes",
        [([1.0], [1.0]), ([0.0, 0.0], [1.0, 2.0]), ([0.0, 1.0], [2.0, 1.0]), ([0.0], [1.0, 2.0])],
    )
    def test_invalid_definition(self, knots, slopes):
        with pytest.raises(DomainError):
            ConvexPotential.piecewise(knots, slopes)

    @pytest.mark.parametrize("slopes", [[0.0], [-1.0, -0.5]])
    def test_non_integrable(self, slopes):
        with pytest.raises(NonIntegrable):
            ConvexPotential.piecewise([0.0, 1.0][: len(slopes)], slopes)

    def test_divergent_callable(self):
        with pytest.raises(NonIntegrable):
            lemma_sides(ConvexPotential.from_function(lambda y: 0.0))

    @given(st.integers(0, 2**32 - 1), st.integers(2, 8))
    def test_random_potentials_satisfy(self, seed, n_knots):
        V = random_convex_potential(np.random.default_rng(seed), n_knots=n_knots)
        assert all(b >= a for a, b in zip(V.slopes, V.slopes[1:]))
        assert check_lemma(V).slack >= -1e-9

    @given(st.floats(0.1, 10.0), st.floats(-3.0, 3.0))
    def test_affine_slack_vanishes(self, lam, v0):
        assert abs(check_lemma(ConvexPotential.affine(lam, v0)).slack) < 1e-9


class TestResidualLife:
    def test_exponential_memoryless(self):
        d = make_family("exponential")
        for t in (0.0, 0.7, 3.0):
            assert residual_life(d, t) == pytest.approx(1.0, abs=1e-9)

    def test_uniform_halves(self):
        d = make_family("uniform")
        assert residual_life(d, 0.5) == pytest.approx(0.25, abs=1e-12)
        assert inactivity_time(d, 0.5) == pytest.approx(0.25, abs=1e-12)

    def test_gaussian_at_zero(self, std_normal):
        assert residual_life(std_normal, 0.0) == pytest.approx(math.sqrt(2 / math.pi), abs=1e-10)

    def test_degenerate(self):
        d = make_family("uniform")
        with pytest.raises(DegenerateRegime):
            residual_life(d, 1.0)
        with pytest.raises(DegenerateRegime):
            inactivity_time(d, 0.0)

    @given(st.floats(-2.0, 2.0))
    def test_derivative_identity(self, t):
        # m'(t) = -slack / rhs for the translated potential, so slack >= 0 means m is nonincreasing
        d = make_family("laplace", b=0.7)
        lhs, rhs = lemma_sides(translated_potential(d, t))
        h = 1e-4
        deriv = (residual_life(d, t + h) - residual_life(d, t - h)) / (2 * h)
        if abs(t) > 2 * h:  # the potential has a kink at 0
            assert deriv == pytest.approx(-(rhs - lhs) / rhs, abs=1e-5)


class TestMonotonicity:
    @pytest.mark.parametrize("family, params", [("gaussian", {}), ("laplace", {}), ("uniform", {"a": -1}),
                                                ("weibull", {"k": 3.44})])
    def test_log_concave_laws(self, family, params):
        rep = monotonicity_probe(make_family(family, **params), 100)
        assert (rep.m_violations, rep.k_violations) == (0, 0)

    def test_two_maxima_law_violates(self, two_maxima):
        assert monotonicity_probe(two_maxima, 200).m_violations > 0

    def test_grid_size(self, std_normal):
        with pytest.raises(DomainError):
            monotonicity_probe(std_normal, 2)
