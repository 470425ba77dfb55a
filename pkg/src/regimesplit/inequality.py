"""Convex-potential integral inequality and mean residual life / inactivity time.

For convex ``V`` on ``[0, inf)`` with ``exp(-V)`` and ``y exp(-V)`` integrable::

    exp(-V(0)) * int_0^inf y exp(-V(y)) dy  <=  (int_0^inf exp(-V(y)) dy)^2

with equality exactly for affine ``V``.  Applied to ``V(t + u) - V(t)`` the
inequality is the statement that the mean residual life of a log-concave law
is nonincreasing.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .density import INF, Density1D, QuadratureConfig, _quad, _safe_exp_neg
from .exceptions import DegenerateRegime, DomainError, NonIntegrable

# final slope at or below this is rejected before integrating
MIN_FINAL_SLOPE = 1e-6


@dataclass(frozen=True)
class ConvexPotential:
    """Convex ``V`` on ``[0, inf)``: either piecewise linear or a callable.

    Piecewise-linear form: ``knots[0] == 0``, slope ``slopes[i]`` on
    ``[knots[i], knots[i+1])`` and the last slope continues to infinity.
    """

    knots: tuple = ()
    slopes: tuple = ()
    v0: float = 0.0
    func: Callable[[float], float] | None = None
    quad_cfg: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if self.func is not None:
            return
        if len(self.knots) != len(self.slopes) or not self.knots:
            raise DomainError("need one slope per knot")
        if self.knots[0] != 0:
            raise DomainError("first knot must be 0")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise DomainError("knots must be strictly increasing")
        if any(b < a for a, b in zip(self.slopes, self.slopes[1:])):
            raise DomainError("slopes must be nondecreasing (convexity)")
        if not self.slopes[-1] > MIN_FINAL_SLOPE:
            raise NonIntegrable("final slope must be positive for exp(-V) to be integrable")

    @classmethod
    def piecewise(cls, knots: Sequence[float], slopes: Sequence[float], v0: float = 0.0):
        return cls(tuple(float(k) for k in knots), tuple(float(s) for s in slopes), float(v0))

    @classmethod
    def affine(cls, lam: float, v0: float = 0.0):
        return cls.piecewise([0.0], [lam], v0)

    @classmethod
    def from_function(cls, V: Callable[[float], float], quad_cfg: QuadratureConfig | None = None):
        return cls(func=V, quad_cfg=quad_cfg or QuadratureConfig())

    @property
    def is_piecewise(self) -> bool:
        return self.func is None

    def knot_values(self) -> list:
        vals = [self.v0]
        for i in range(1, len(self.knots)):
            vals.append(vals[-1] + self.slopes[i - 1] * (self.knots[i] - self.knots[i - 1]))
        return vals

    def __call__(self, y: float) -> float:
        if self.func is not None:
            return self.func(y)
        i = max(int(np.searchsorted(self.knots, y, side="right")) - 1, 0)
        return self.knot_values()[i] + self.slopes[i] * (y - self.knots[i])


def _seg_mass(s: float, length: float) -> float:
    """``int_0^L exp(-s u) du`` (``L`` may be infinite)."""
    if length == INF:
        return 1.0 / s
    x = s * length
    if abs(x) < 1e-8:
        return length * (1.0 - x / 2.0)
    return -math.expm1(-x) / s


def _seg_first(s: float, length: float) -> float:
    """``int_0^L u exp(-s u) du`` (``L`` may be infinite)."""
    if length == INF:
        return 1.0 / (s * s)
    x = s * length
    if abs(x) < 1e-3:
        # (1 - e^{-x}(1+x)) / x^2 by its Taylor series
        r = 0.5 - x / 3.0 + x * x / 8.0 - x**3 / 30.0 + x**4 / 144.0
        return length * length * r
    return (-math.expm1(-x) - x * math.exp(-x)) / (s * s)


def _piecewise_integrals(V: ConvexPotential):
    vals = V.knot_values()
    ends = list(V.knots[1:]) + [INF]
    mass = first = 0.0
    for a, b, s, c in zip(V.knots, ends, V.slopes, vals):
        scale = _safe_exp_neg(c)
        m0 = _seg_mass(s, b - a)
        mass += scale * m0
        first += scale * (a * m0 + _seg_first(s, b - a))
    return mass, first


def _halfline_integral(fn, cfg: QuadratureConfig) -> float:
    # doubling chunks on [0, inf) until the increments are negligible
    total, a, width = 0.0, 0.0, 1.0
    for _ in range(90):
        m = _quad(fn, a, a + width, cfg)
        total += m
        if a > 0 and abs(m) <= 1e-3 * cfg.tail_mass_eps * abs(total):
            return total
        a, width = a + width, 2.0 * width
    raise NonIntegrable("integral over [0, inf) does not converge")


@dataclass(frozen=True)
class LemmaReport:
    holds: bool
    lhs: float
    rhs: float
    slack: float

    def to_dict(self) -> dict:
        return asdict(self)


def lemma_sides(V: ConvexPotential):
    """Return ``(lhs, rhs)`` of the convex-potential inequality."""
    if V.is_piecewise:
        mass, first = _piecewise_integrals(V)
        v0 = V.v0
    else:
        f = V.func
        mass = _halfline_integral(lambda y: _safe_exp_neg(f(y)), V.quad_cfg)
        first = _halfline_integral(lambda y: y * _safe_exp_neg(f(y)), V.quad_cfg)
        v0 = f(0.0)
    if not (math.isfinite(mass) and math.isfinite(first)):
        raise NonIntegrable("potential integrals diverge")
    return _safe_exp_neg(v0) * first, mass * mass


def check_lemma(V: ConvexPotential, tol: float = 1e-9) -> LemmaReport:
    lhs, rhs = lemma_sides(V)
    return LemmaReport(lhs <= rhs + tol, lhs, rhs, rhs - lhs)


def random_convex_potential(rng: np.random.Generator, n_knots: int = 5, span: float = 10.0) -> ConvexPotential:
    """Random piecewise-linear convex potential on ``[0, inf)``.

    Knots come from a unit-rate spacing process squeezed into ``[0, span)``;
    slopes are a random start plus cumulative nonnegative increments, with a
    strictly positive final slope.
    """
    gaps = rng.exponential(1.0, size=n_knots - 1)
    knots = np.concatenate([[0.0], np.cumsum(gaps)])
    if knots[-1] >= span:
        knots *= 0.999 * span / knots[-1]
    slopes = rng.uniform(-2.0, 2.0) + np.concatenate([[0.0], np.cumsum(rng.exponential(1.0, size=n_knots - 1))])
    if slopes[-1] <= 0.05:
        slopes[-1] = 0.05 + rng.exponential(1.0)
    return ConvexPotential.piecewise(knots, slopes, rng.uniform(-2.0, 2.0))


def translated_potential(d: Density1D, t: float) -> ConvexPotential:
    """``u -> V(t + u) - V(t)`` for the potential of ``d``."""
    V = d.neg_log_density
    vt = V(t)
    if not math.isfinite(vt):
        raise DomainError(f"potential is infinite at t={t}")
    hi = d.window[1] if d.is_normalized else d.support.hi
    cfg = d.quad_cfg

    if hi < INF:
        # bounded support: integrals stop at the edge, so use a finite-window callable
        def f(u):
            return V(t + u) - vt if t + u <= hi else INF
    else:
        def f(u):
            return V(t + u) - vt

    return ConvexPotential.from_function(f, cfg)


# -- mean residual life / mean inactivity time ---------------------------


def residual_life(d: Density1D, t: float) -> float:
    """Mean residual life ``E[X - t | X > t]``."""
    lo, hi = d.window
    mass = d.expect(lambda x: 1.0, t, hi)
    if mass <= d.quad_cfg.abs_tol:
        raise DegenerateRegime(f"P(X > {t}) is zero")
    return d.expect(lambda x: x - t, t, hi) / mass


def inactivity_time(d: Density1D, t: float) -> float:
    """Mean inactivity time ``E[t - X | X <= t]``."""
    lo, hi = d.window
    mass = d.expect(lambda x: 1.0, lo, t)
    if mass <= d.quad_cfg.abs_tol:
        raise DegenerateRegime(f"P(X <= {t}) is zero")
    return d.expect(lambda x: t - x, lo, t) / mass


@dataclass(frozen=True)
class MonotonicityReport:
    m_violations: int
    k_violations: int
    worst: float
    grid: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {"m_violations": self.m_violations, "k_violations": self.k_violations, "worst": self.worst}


def quantile_grid(d: Density1D, n: int, p_lo: float = 1e-3, p_hi: float = 1 - 1e-3) -> np.ndarray:
    return np.array([d.quantile(float(p)) for p in np.linspace(p_lo, p_hi, n)])


def monotonicity_probe(d: Density1D, n: int = 100, slack: float = 1e-8) -> MonotonicityReport:
    """Count increases of residual life and decreases of inactivity time on a quantile grid.

    ``worst`` is the largest violation size (``0.0`` when there is none).
    """
    if n < 3:
        raise DomainError("monotonicity_probe needs n >= 3")
    ts = quantile_grid(d, n)
    m = np.array([residual_life(d, float(t)) for t in ts])
    k = np.array([inactivity_time(d, float(t)) for t in ts])
    dm = np.diff(m)  # should be <= 0
    dk = np.diff(k)  # should be >= 0
    worst = max(0.0, float(dm.max()), float(-dk.min()))
    return MonotonicityReport(int((dm > slack).sum()), int((dk < -slack).sum()), worst, tuple(ts))
