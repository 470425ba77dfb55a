from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regimesplit import ConvexPolygon, DegenerateCut, DegeneratePolygon, DomainError, R_polygon, hexagon_counterexample
from regimesplit.geometry import (
    R_sweep,
    area,
    as_rational,
    clip_vertical,
    convex_hull,
    first_moments,
    hexagon,
    random_convex_polygon,
    sample_uniform,
)

SQUARE = ConvexPolygon(((0, 0), (1, 0), (1, 1), (0, 1)))
TRIANGLE = ConvexPolygon(((0, 0), (1, 0), (0, 1)))


class TestPolygon:
    def test_areas(self):
        assert area(SQUARE) == 1
        assert area(TRIANGLE) == Fraction(1, 2)
        assert area(hexagon()) == 104

    def test_moments(self):
        assert first_moments(SQUARE) == (Fraction(1, 2), Fraction(1, 2))
        assert first_moments(TRIANGLE) == (Fraction(1, 6), Fraction(1, 6))
        assert first_moments(hexagon()) == (0, 0)

    def test_clockwise_rejected(self):
        with pytest.raises(DegeneratePolygon):
            ConvexPolygon(((0, 0), (0, 1), (1, 1), (1, 0)))

    def test_nonconvex_rejected(self):
        with pytest.raises(DegeneratePolygon):
            ConvexPolygon(((0, 0), (2, 0), (1, 1), (2, 2), (0, 2)))

    def test_collinear_rejected(self):
        with pytest.raises(DegeneratePolygon):
            ConvexPolygon(((0, 0), (1, 1), (2, 2)))

    def test_redundant_vertices_dropped(self):
        P = ConvexPolygon(((0, 0), (1, 0), (2, 0), (2, 2), (2, 2), (0, 2)))
        assert len(P.vertices) == 4

    def test_text_round_trip(self):
        P = hexagon()
        assert ConvexPolygon.from_text("# hexagon\n" + P.to_text()) == P

    def test_text_errors(self):
        with pytest.raises(DomainError):
            ConvexPolygon.from_text("1 2 3\n")
        with pytest.raises(DomainError):
            as_rational("abc")

    def test_rational_input(self):
        assert as_rational("3/2") == Fraction(3, 2)
        assert as_rational(0.5) == Fraction(1, 2)


class TestClip:
    def test_hexagon_center(self):
        P = clip_vertical(hexagon(), 0, "x_gt")
        assert set(P.vertices) == {(0, -11), (3, -8), (3, 0), (1, 12), (0, 11)}
        assert area(P) == 52

    def test_hexagon_at_one(self):
        P = clip_vertical(hexagon(), 1, "x_gt")
        assert set(P.vertices) == {(1, -10), (3, -8), (3, 0), (1, 12)}
        assert area(P) == 30

    def test_beyond(self):
        assert clip_vertical(hexagon(), 5, "x_gt") is None

    def test_bad_side(self):
        with pytest.raises(DomainError):
            clip_vertical(SQUARE, 0, "up")

    @given(st.integers(0, 10**6), st.fractions(-60, 60))
    def test_halves_partition(self, seed, t):
        P = random_convex_polygon(np.random.default_rng(seed), 10, 50)
        right, left = clip_vertical(P, t, "x_gt"), clip_vertical(P, t, "x_lt")
        a_r = area(right) if right else 0
        a_l = area(left) if left else 0
        assert a_r + a_l == area(P)
        m = first_moments(P)
        parts = [first_moments(q) for q in (right, left) if q]
        assert tuple(sum(c) for c in zip(*parts)) == m


class TestCutFunctional:
    def test_hexagon_values(self):
        assert R_polygon(hexagon(), 0) == Fraction(22045, 12168)
        assert R_polygon(hexagon(), 1) == Fraction(9389, 4995)

    def test_edge_cut(self):
        with pytest.raises(DegenerateCut):
            R_polygon(hexagon(), 3)

    def test_report(self):
        rep = hexagon_counterexample()
        assert rep.centered and rep.counterexample_holds and rep.all_ok
        assert (rep.r0, rep.r1) == (Fraction(22045, 12168), Fraction(9389, 4995))
        assert rep.to_dict()["r1"] == "9389/4995"

    def test_sweep_rows(self):
        rows = R_sweep(hexagon(), [-1, 0, 1])
        vals = [Fraction(r["exact"]) for r in rows]
        # the hexagon is centrally symmetric, so the cuts at -1 and 1 tie
        assert vals[2] == max(vals) == vals[0]
        assert vals[2] > vals[1]

    def test_centered_square(self):
        P = ConvexPolygon(((-1, -1), (1, -1), (1, 1), (-1, 1)))
        # right half moment (1, 0), area 2 on each side
        assert R_polygon(P, 0) == Fraction(1, 4)

    def test_sweep_outside(self):
        rows = R_sweep(SQUARE, [2, Fraction(1, 2)])
        assert "DegenerateCut" in rows[0]["error"]
        # right half moment (3/8, 1/4), both areas 1/2
        assert rows[1]["exact"] == "13/16"

    def test_translation_changes_only_through_moments(self):
        # shifting x by a and the cut by a leaves areas equal; R picks up the shifted moment
        P, Q = SQUARE, SQUARE.translate(3, 0)
        assert area(clip_vertical(Q, Fraction(7, 2), "x_gt")) == area(clip_vertical(P, Fraction(1, 2), "x_gt"))


class TestRandom:
    def test_hull_ccw(self):
        hull = convex_hull([(0, 0), (2, 0), (1, 1), (2, 2), (0, 2), (1, 0)])
        assert hull == [(0, 0), (2, 0), (2, 2), (0, 2)]

    def test_sampler_matches_moments(self):
        rng = np.random.default_rng(3)
        P = hexagon()
        pts = sample_uniform(P, 40000, rng)
        assert pts.shape == (40000, 2)
        np.testing.assert_allclose(pts.mean(axis=0), [0, 0], atol=0.1)
