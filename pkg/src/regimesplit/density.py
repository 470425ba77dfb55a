"""One-dimensional laws: log-density representation, quadrature, and built-in families.

A :class:`Density1D` stores the potential ``V`` (density proportional to
``exp(-V)``) together with a support interval.  Integrals are computed with
adaptive Gauss-Kronrod quadrature on a finite window; infinite tails are cut
where the remaining mass drops below ``QuadratureConfig.tail_mass_eps``.

:class:`EmpiricalDist` is the finite-atom counterpart used for exact
brute-force checks.
"""

from __future__ import annotations

import bisect
import configparser
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize

from .exceptions import DomainError, NonIntegrable

INF = math.inf

__all__ = [
    "SupportInterval",
    "QuadratureConfig",
    "Density1D",
    "EmpiricalDist",
    "LogConcavityReport",
    "normalize",
    "cdf",
    "partial_mean",
    "quantile",
    "make_family",
    "family_from_config",
    "logconcavity_probe",
    "weibull_mean_median_k",
    "FAMILIES",
]


@dataclass(frozen=True)
class SupportInterval:
    lo: float = -INF
    hi: float = INF

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"support needs lo < hi, got [{self.lo}, {self.hi}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200
    tail_mass_eps: float = 1e-13

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.tail_mass_eps) <= 0:
            raise DomainError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


# outward chunks of doubling width used to locate the tail cut-offs
_MAX_TAIL_CHUNKS = 90


def _quad(fn, a: float, b: float, cfg: QuadratureConfig, points=()) -> float:
    """Adaptive quadrature of ``fn`` over the finite interval ``[a, b]``."""
    if not a < b:
        return 0.0
    pts = sorted({p for p in points if a < p < b})
    limit = max(cfg.max_subdivisions, len(pts) + 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            fn,
            a,
            b,
            points=pts or None,
            epsabs=0.0,
            epsrel=cfg.rel_tol,
            limit=limit,
            full_output=1,
        )
    val, err = out[0], out[1]
    if not (math.isfinite(val) and math.isfinite(err)):
        raise NonIntegrable(f"quadrature on [{a}, {b}] produced a non-finite value")
    if len(out) > 3 and err > max(1e-8 * abs(val), 1e3 * cfg.abs_tol):
        raise NonIntegrable(f"quadrature on [{a}, {b}] failed: {out[3]}")
    return val


def _safe_exp_neg(v: float) -> float:
    if v != v:  # NaN
        raise NonIntegrable("potential returned NaN")
    if v == INF:
        return 0.0
    if v < -700.0:
        raise NonIntegrable("density overflow: exp(-V) is not integrable")
    return math.exp(-v)


@dataclass(frozen=True)
class Density1D:
    """Law with density ``exp(-V(x) - log_norm)`` on ``support``.

    Construct through :func:`make_family` or directly with a potential and
    then call :meth:`normalize`; every moment/quantile method requires a
    normalized instance.  Instances are immutable and thread-safe.
    """

    neg_log_density: Callable[[float], float]
    support: SupportInterval = field(default_factory=SupportInterval)
    quad_cfg: QuadratureConfig = field(default_factory=QuadratureConfig)
    breakpoints: tuple = ()
    name: str = "custom"
    params: tuple = ()
    log_norm: float | None = None
    mean_cache: float | None = None
    second_moment_cache: float | None = None
    window: tuple | None = None

    # -- construction -----------------------------------------------------

    @property
    def is_normalized(self) -> bool:
        return self.log_norm is not None

    def normalize(self) -> "Density1D":
        if self.is_normalized:
            return self
        cfg = self.quad_cfg
        V = self.neg_log_density
        lo, hi = self.support.lo, self.support.hi
        x0, v_ref = self._anchor()

        def w(x):
            return _safe_exp_neg(V(x) - v_ref)

        pts = self.breakpoints
        left = self._walk_tail(w, x0, -1) if lo == -INF else [(lo, _quad(w, lo, x0, cfg, pts))]
        right = self._walk_tail(w, x0, +1) if hi == INF else [(hi, _quad(w, x0, hi, cfg, pts))]
        total = sum(m for _, m in left) + sum(m for _, m in right)
        if not total > 0 or not math.isfinite(total):
            raise NonIntegrable("exp(-V) has zero or infinite mass on the support")

        win_lo = lo if lo > -INF else self._cut(left, total)
        win_hi = hi if hi < INF else self._cut(right, total)
        # one pass over the final window keeps the total mass exactly consistent
        z = _quad(w, win_lo, win_hi, cfg, pts)
        log_norm = math.log(z) - v_ref
        tmp = replace(self, log_norm=log_norm, window=(win_lo, win_hi))
        mean = tmp._moment(lambda x: x, win_lo, win_hi)
        second = tmp._moment(lambda x: x * x, win_lo, win_hi)
        return replace(tmp, mean_cache=mean, second_moment_cache=second)

    def _anchor(self):
        """Point of (near) maximal density used as the tail-walk origin."""
        lo, hi = self.support.lo, self.support.hi
        cands = list(self.breakpoints)
        if self.support.is_bounded:
            cands += [lo + (hi - lo) * f for f in (0.5, 0.25, 0.75, 0.1, 0.9)]
        for k in range(-6, 41):
            cands += [2.0**k, -(2.0**k)]
        cands.append(0.0)
        for e in (lo, hi):
            if math.isfinite(e):
                span = 1.0 if not self.support.is_bounded else (hi - lo)
                cands += [e + 1e-6 * span if e == lo else e - 1e-6 * span]
        best = None
        for c in cands:
            if not (lo < c < hi):
                continue
            v = self.neg_log_density(c)
            if math.isfinite(v) and (best is None or v < best[1]):
                best = (c, v)
        if best is None:
            raise NonIntegrable("potential is infinite at every probe point of the support")
        return best

    def _walk_tail(self, w, x0: float, direction: int):
        cfg = self.quad_cfg
        chunks = []
        a, width, total = x0, 1.0, 0.0
        for _ in range(_MAX_TAIL_CHUNKS):
            b = a + direction * width
            m = _quad(w, min(a, b), max(a, b), cfg, self.breakpoints)
            chunks.append((b, m))
            total += m
            if len(chunks) >= 2 and m <= 1e-3 * cfg.tail_mass_eps * total:
                return chunks
            a, width = b, 2.0 * width
        raise NonIntegrable("tail mass does not decay; exp(-V) is not integrable")

    def _cut(self, chunks, total: float) -> float:
        """First chunk boundary beyond which the remaining mass is negligible."""
        eps = self.quad_cfg.tail_mass_eps * total
        beyond = 0.0
        tails = []
        for b, m in reversed(chunks):
            tails.append((b, beyond))
            beyond += m
        for b, rest in reversed(tails):
            if rest < eps:
                return b
        return chunks[-1][0]

    # -- evaluation -------------------------------------------------------

    def _require_normalized(self):
        if not self.is_normalized:
            raise DomainError("density is not normalized; call normalize() first")

    def pdf(self, x: float) -> float:
        self._require_normalized()
        if x not in self.support:
            return 0.0
        v = self.neg_log_density(x)
        return 0.0 if v == INF else math.exp(-v - self.log_norm)

    def logpdf(self, x: float) -> float:
        self._require_normalized()
        if x not in self.support:
            return -INF
        return -self.neg_log_density(x) - self.log_norm

    def _moment(self, g, a: float, b: float) -> float:
        V, ln = self.neg_log_density, self.log_norm

        def fn(x):
            v = V(x)
            return 0.0 if v == INF else g(x) * math.exp(-v - ln)

        return _quad(fn, a, b, self.quad_cfg, self.breakpoints)

    def expect(self, g: Callable[[float], float], a: float = -INF, b: float = INF) -> float:
        """``E[g(X); a < X <= b]`` restricted to the quadrature window."""
        self._require_normalized()
        lo, hi = self.window
        return self._moment(g, max(a, lo), min(b, hi))

    @property
    def mean(self) -> float:
        self._require_normalized()
        return self.mean_cache

    @property
    def second_moment(self) -> float:
        self._require_normalized()
        return self.second_moment_cache

    @property
    def variance(self) -> float:
        return max(self.second_moment - self.mean**2, 0.0)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def split_moments(self, t: float):
        """Return ``(P(X<=t), P(X>t), E[X, X<=t], E[X, X>t])``.

        The side holding less of the bulk (relative to the mean) is integrated
        directly and the other is obtained by complement, so small tail
        quantities keep full relative precision.
        """
        self._require_normalized()
        lo, hi = self.window
        mu = self.mean_cache
        if t <= lo:
            return 0.0, 1.0, 0.0, mu
        if t >= hi:
            return 1.0, 0.0, mu, 0.0
        if t < mu:
            p_lo = self._moment(lambda x: 1.0, lo, t)
            m_lo = self._moment(lambda x: x, lo, t)
            return p_lo, 1.0 - p_lo, m_lo, mu - m_lo
        p_hi = self._moment(lambda x: 1.0, t, hi)
        m_hi = self._moment(lambda x: x, t, hi)
        return 1.0 - p_hi, p_hi, mu - m_hi, m_hi

    def cdf(self, t: float) -> float:
        self._require_normalized()
        lo, hi = self.window
        if t <= lo:
            return 0.0
        if t >= hi:
            return 1.0
        if t < self.mean_cache:
            p = self._moment(lambda x: 1.0, lo, t)
        else:
            p = 1.0 - self._moment(lambda x: 1.0, t, hi)
        return min(max(p, 0.0), 1.0)

    def sf(self, t: float) -> float:
        self._require_normalized()
        lo, hi = self.window
        if t <= lo:
            return 1.0
        if t >= hi:
            return 0.0
        if t >= self.mean_cache:
            p = self._moment(lambda x: 1.0, t, hi)
        else:
            p = 1.0 - self._moment(lambda x: 1.0, lo, t)
        return min(max(p, 0.0), 1.0)

    def partial_mean(self, t: float, side: str = "lower") -> float:
        if side not in ("lower", "upper"):
            raise DomainError(f"side must be 'lower' or 'upper', got {side!r}")
        _, _, m_lo, m_hi = self.split_moments(t)
        return m_lo if side == "lower" else m_hi

    def quantile(self, p: float) -> float:
        self._require_normalized()
        if not 0.0 < p < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {p}")
        lo, hi = self.window
        if p <= 0.5:
            fn = lambda t: self.cdf(t) - p  # noqa: E731
        else:
            q = 1.0 - p
            fn = lambda t: q - self.sf(t)  # noqa: E731
        scale = max(hi - lo, 1e-300)
        return optimize.brentq(fn, lo, hi, xtol=1e-15 * scale + 1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    def affine(self, scale: float, shift: float = 0.0) -> "Density1D":
        """Law of ``scale * X + shift``."""
        if scale == 0 or not math.isfinite(scale):
            raise DomainError("affine scale must be finite and nonzero")
        V = self.neg_log_density

        def V_new(x, V=V, scale=scale, shift=shift):
            return V((x - shift) / scale)

        def f(x):
            return scale * x + shift

        lo, hi = sorted((f(self.support.lo), f(self.support.hi)))
        out = replace(
            self,
            neg_log_density=V_new,
            support=SupportInterval(lo, hi),
            breakpoints=tuple(sorted(f(b) for b in self.breakpoints)),
            name=f"{self.name}*{scale:g}+{shift:g}",
            log_norm=None,
            mean_cache=None,
            second_moment_cache=None,
            window=None,
        )
        if not self.is_normalized:
            return out
        w_lo, w_hi = sorted((f(self.window[0]), f(self.window[1])))
        mu, m2 = self.mean_cache, self.second_moment_cache
        return replace(
            out,
            log_norm=self.log_norm + math.log(abs(scale)),
            mean_cache=scale * mu + shift,
            second_moment_cache=scale * scale * m2 + 2 * scale * shift * mu + shift * shift,
            window=(w_lo, w_hi),
        )

    def shifted(self, shift: float) -> "Density1D":
        return self.affine(1.0, shift)


# -- module-level operations ---------------------------------------------


def normalize(d: Density1D) -> Density1D:
    return d.normalize()


def cdf(d: Density1D, t: float) -> float:
    return d.cdf(t)


def partial_mean(d: Density1D, t: float, side: str = "lower") -> float:
    """``E[X, X <= t]`` (``side='lower'``) or ``E[X, X > t]`` (``side='upper'``)."""
    return d.partial_mean(t, side)


def quantile(d: Density1D, p: float) -> float:
    return d.quantile(p)


# -- families ------------------------------------------------------------


def _gaussian(mu: float = 0.0, sigma: float = 1.0, **cfg):
    if not sigma > 0:
        raise DomainError("gaussian needs sigma > 0")
    inv = 1.0 / (2.0 * sigma * sigma)
    return Density1D(lambda x: (x - mu) ** 2 * inv, breakpoints=(mu,), name="gaussian",
                     params=(("mu", mu), ("sigma", sigma)), **cfg)


def _laplace(mu: float = 0.0, b: float = 1.0, **cfg):
    if not b > 0:
        raise DomainError("laplace needs scale b > 0")
    return Density1D(lambda x: abs(x - mu) / b, breakpoints=(mu,), name="laplace",
                     params=(("mu", mu), ("b", b)), **cfg)


def _uniform(a: float = 0.0, b: float = 1.0, **cfg):
    if not b > a:
        raise DomainError("uniform needs b > a")
    return Density1D(lambda x: 0.0, support=SupportInterval(a, b), name="uniform",
                     params=(("a", a), ("b", b)), **cfg)


def _weibull(k: float = 1.0, scale: float = 1.0, **cfg):
    # survival function exp(-(x/scale)^k) on [0, inf)
    if not (k > 0 and scale > 0):
        raise DomainError("weibull needs k > 0 and scale > 0")
    log_c = math.log(k / scale)

    def V(x):
        if x <= 0.0:
            return INF if k > 1 else (-log_c if k == 1 else INF)
        z = x / scale
        return -log_c - (k - 1.0) * math.log(z) + z**k

    return Density1D(V, support=SupportInterval(0.0, INF), name="weibull",
                     params=(("k", k), ("scale", scale)), **cfg)


def _exponential(rate: float = 1.0, **cfg):
    if not rate > 0:
        raise DomainError("exponential needs rate > 0")
    return Density1D(lambda x: rate * x, support=SupportInterval(0.0, INF), name="exponential",
                     params=(("rate", rate),), **cfg)


def _piecewise(breaks: Sequence[float], values: Sequence[float], **cfg):
    breaks = [float(b) for b in breaks]
    values = [float(v) for v in values]
    if len(breaks) != len(values) + 1 or len(values) < 1:
        raise DomainError("piecewise needs len(breaks) == len(values) + 1 >= 2")
    if any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
        raise DomainError("piecewise breakpoints must be strictly increasing")
    if any(v < 0 or not math.isfinite(v) for v in values):
        raise DomainError("piecewise values must be finite and nonnegative")
    if not any(v > 0 for v in values):
        raise DomainError("piecewise density needs positive total mass")
    pot = [-math.log(v) if v > 0 else INF for v in values]
    inner = breaks[1:-1]

    def V(x):
        return pot[bisect.bisect_right(inner, x)]

    return Density1D(V, support=SupportInterval(breaks[0], breaks[-1]), breakpoints=tuple(inner),
                     name="piecewise", params=(("breaks", tuple(breaks)), ("values", tuple(values))), **cfg)


FAMILIES = {
    "gaussian": _gaussian,
    "normal": _gaussian,
    "laplace": _laplace,
    "uniform": _uniform,
    "weibull": _weibull,
    "exponential": _exponential,
    "piecewise": _piecewise,
    "piecewise_const": _piecewise,
}


def make_family(family: str | Mapping, quad_cfg: QuadratureConfig | None = None, **params) -> Density1D:
    """Build and normalize a built-in family.

    ``family`` is a name (``gaussian``, ``laplace``, ``uniform``, ``weibull``,
    ``exponential``, ``piecewise``) with keyword parameters, or a mapping
    holding a ``family`` key plus parameters.

    >>> round(make_family("weibull", k=1).mean, 9)
    1.0
    """
    if isinstance(family, Mapping):
        params = {**{k: v for k, v in family.items() if k != "family"}, **params}
        family = family["family"]
    try:
        builder = FAMILIES[str(family).lower()]
    except KeyError:
        raise DomainError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if "breakpoints" in params:
        params["breaks"] = params.pop("breakpoints")
    cfg = {"quad_cfg": quad_cfg} if quad_cfg is not None else {}
    try:
        d = builder(**params, **cfg)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {family}: {exc}") from None
    return d.normalize()


def _parse_value(text: str):
    parts = [p for p in text.replace(",", " ").split() if p]
    nums = []
    for p in parts:
        try:
            nums.append(float(p))
        except ValueError:
            return text.strip()
    if len(nums) == 1 and "," not in text:
        return nums[0]
    return nums


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` comments) into a dict.

    Numeric values become floats, comma/space separated lists become lists of
    floats, anything else stays a string.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    cp.read_string("[top]\n" + text)
    return {k: _parse_value(v) for k, v in cp["top"].items()}


def family_from_config(text: str, quad_cfg: QuadratureConfig | None = None) -> Density1D:
    """Family descriptor in key/value text, e.g. ``family = piecewise`` /
    ``breaks = -2, -0.1, 0.1, 2`` / ``values = 0.125, 2.625, 0.125``."""
    desc = parse_config(text)
    if "family" not in desc:
        raise DomainError("family descriptor needs a 'family' key")
    return make_family(desc, quad_cfg=quad_cfg)


# -- probes --------------------------------------------------------------


@dataclass(frozen=True)
class LogConcavityReport:
    is_plausibly_logconcave: bool
    worst_violation: float


def logconcavity_probe(d: Density1D, n_points: int = 101) -> LogConcavityReport:
    """Second differences of ``V`` on an even grid over the central quantile range.

    ``worst_violation`` is the most negative second difference (``0.0`` or
    positive means none was negative).
    """
    if n_points < 3:
        raise DomainError("logconcavity_probe needs n_points >= 3")
    eps = d.quad_cfg.tail_mass_eps
    xs = np.linspace(d.quantile(eps), d.quantile(1.0 - eps), n_points)
    v = np.array([d.neg_log_density(float(x)) for x in xs], dtype=float)
    if not np.all(np.isfinite(v)):
        return LogConcavityReport(False, -INF)
    d2 = v[:-2] - 2.0 * v[1:-1] + v[2:]
    worst = float(d2.min())
    tol = 1e-9 * max(1.0, float(np.abs(v).max()))
    return LogConcavityReport(worst >= -tol, worst)


def weibull_mean_median_k() -> float:
    """Shape ``k`` at which the Weibull mean ``Gamma(1+1/k)`` equals its median ``ln(2)^(1/k)``."""

    def gap(k):
        return math.gamma(1.0 + 1.0 / k) - math.log(2.0) ** (1.0 / k)

    return optimize.brentq(gap, 1.0, 20.0, xtol=1e-12)


# -- empirical laws ------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalDist:
    """Finite weighted atoms, sorted by value with duplicates merged."""

    values: np.ndarray
    weights: np.ndarray
    total_weight: float

    @classmethod
    def from_samples(cls, values, weights=None) -> "EmpiricalDist":
        x = np.asarray(values, dtype=float).ravel()
        w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float).ravel()
        if x.size == 0:
            raise DomainError("empirical law needs at least one atom")
        if w.shape != x.shape:
            raise DomainError("values and weights must have the same length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise DomainError("atoms must be finite")
        if np.any(w <= 0):
            raise DomainError("atom weights must be positive")
        uniq, inv = np.unique(x, return_inverse=True)
        merged = np.bincount(inv, weights=w)
        return cls(uniq, merged, float(merged.sum()))

    @classmethod
    def from_atoms(cls, atoms) -> "EmpiricalDist":
        atoms = list(atoms)
        return cls.from_samples([a[0] for a in atoms], [a[1] for a in atoms])

    @property
    def atoms(self):
        return list(zip(self.values.tolist(), self.weights.tolist()))

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights / self.total_weight

    @property
    def mean(self) -> float:
        return float(np.dot(self.probabilities, self.values))

    @property
    def second_moment(self) -> float:
        return float(np.dot(self.probabilities, self.values**2))

    @property
    def variance(self) -> float:
        p = self.probabilities
        return float(np.dot(p, (self.values - self.mean) ** 2))

    def split_moments(self, t: float):
        i = int(np.searchsorted(self.values, t, side="right"))
        p = self.probabilities
        p_lo = float(p[:i].sum())
        p_hi = float(p[i:].sum())
        return p_lo, p_hi, float(np.dot(p[:i], self.values[:i])), float(np.dot(p[i:], self.values[i:]))

    def cdf(self, t: float) -> float:
        return self.split_moments(t)[0]

    def partial_mean(self, t: float, side: str = "lower") -> float:
        if side not in ("lower", "upper"):
            raise DomainError(f"side must be 'lower' or 'upper', got {side!r}")
        _, _, lo, hi = self.split_moments(t)
        return lo if side == "lower" else hi

    def __len__(self):
        return int(self.values.size)
