"""Two-regime approximation in R^d: quadratic-loss halfspaces and elliptical laws.

For an elliptical law with mean ``mu``, scatter ``Sigma`` and standardized
projection ``Z0``, the halfspace functional over ``{<x - mu, u> <= t}`` splits as::

    F(u, t) = |mu|^2 + |Sigma u|^2 / (u'Sigma u)^2 * E[Z 1{Z<=t}]^2 / (P(Z<=t) P(Z>t))

with ``Z = sqrt(u'Sigma u) Z0``.  At ``t = 0`` this equals
``4 c0^2 R(u)`` where ``c0 = E[(Z0)+]`` and ``R(u) = u'Sigma^2 u / u'Sigma u``,
maximized by a top eigenvector of ``Sigma``.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .density import Density1D, logconcavity_probe, make_family, parse_config
from .exceptions import ConsistencyError, DegenerateRegime, DomainError, EigenFailure, NotLogConcave
from .splitcore import f_X, solve_logconcave

# -- symmetric eigensolver -----------------------------------------------


def jacobi_eigh(A, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns.  Stops when the off-diagonal Frobenius norm is
    below ``tol`` times the matrix norm; raises :class:`EigenFailure` after
    ``max_sweeps`` sweeps.
    """
    a = np.array(A, dtype=float, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DomainError("jacobi_eigh needs a square matrix")
    v = np.eye(n)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(2.0) * float(np.linalg.norm(np.triu(a, 1)))
        if off <= tol * scale:
            order = np.argsort(np.diag(a), kind="stable")
            return np.diag(a)[order].copy(), v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = 100.0 * abs(apq)
                if abs(a[p, p]) + g == abs(a[p, p]) and abs(a[q, q]) + g == abs(a[q, q]):
                    # negligible next to the diagonal; rotating would overflow theta
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/cols p and q
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise EigenFailure(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _fix_sign(u: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(u) > 1e-14)
    if nz.size and u[nz[0]] < 0:
        return -u
    return u


# -- models --------------------------------------------------------------

# standardized (unit variance) projection laws
Z0_FAMILIES = {
    "gaussian": lambda: make_family("gaussian", mu=0.0, sigma=1.0),
    "uniform": lambda: make_family("uniform", a=-math.sqrt(3.0), b=math.sqrt(3.0)),
    "laplace": lambda: make_family("laplace", mu=0.0, b=1.0 / math.sqrt(2.0)),
}


@dataclass(frozen=True)
class EllipticalModel:
    mu: np.ndarray
    sigma: np.ndarray
    z0_law: Density1D = field(default_factory=Z0_FAMILIES["gaussian"])
    kind: str = "gaussian"

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).ravel()
        sigma = np.asarray(self.sigma, dtype=float)
        d = mu.size
        if sigma.shape != (d, d):
            raise DomainError(f"scatter matrix must be {d}x{d}, got {sigma.shape}")
        if np.max(np.abs(sigma - sigma.T)) > 1e-12 * max(1.0, np.max(np.abs(sigma))):
            raise DomainError("scatter matrix must be symmetric")
        if jacobi_eigh(sigma)[0][0] <= 0:
            raise DomainError("scatter matrix must be positive definite")
        z0 = self.z0_law
        if abs(z0.mean) > 1e-9 or abs(z0.cdf(0.0) - 0.5) > 1e-9:
            raise DomainError("z0 law must be centered and weakly symmetric")
        if self.kind not in ("gaussian", "custom"):
            raise DomainError("kind must be 'gaussian' or 'custom'")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def gaussian(cls, mu, sigma) -> "EllipticalModel":
        return cls(np.asarray(mu, float), np.asarray(sigma, float), Z0_FAMILIES["gaussian"](), "gaussian")

    @property
    def dim(self) -> int:
        return self.mu.size

    def shifted(self, delta) -> "EllipticalModel":
        return EllipticalModel(self.mu + np.asarray(delta, float), self.sigma, self.z0_law, self.kind)

    def projection_law(self, u) -> Density1D:
        """Law of ``<X - mu, u>`` for unit ``u`` (scaled ``Z0``)."""
        u = _unit(u)
        return self.z0_law.affine(math.sqrt(float(u @ self.sigma @ u)))


def model_from_config(text: str) -> EllipticalModel:
    """Key/value model description::

        dimension = 2
        mean = 0 0
        scatter = 4 0 0 1      # row-major
        z0 = gaussian          # gaussian | uniform | laplace
    """
    cfg = parse_config(text)
    try:
        d = int(cfg["dimension"])
        mean = np.atleast_1d(np.asarray(cfg["mean"], dtype=float))
        scatter = np.asarray(cfg["scatter"], dtype=float)
    except KeyError as exc:
        raise DomainError(f"model config is missing {exc}") from None
    if mean.size != d or scatter.size != d * d:
        raise DomainError("mean/scatter sizes do not match the dimension")
    z0 = str(cfg.get("z0", "gaussian")).lower()
    if z0 not in Z0_FAMILIES:
        raise DomainError(f"unknown z0 family {z0!r}; choose from {sorted(Z0_FAMILIES)}")
    kind = "gaussian" if z0 == "gaussian" else "custom"
    return EllipticalModel(mean, scatter.reshape(d, d), Z0_FAMILIES[z0](), kind)


def _unit(u) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    n = float(np.linalg.norm(u))
    if n == 0.0 or not math.isfinite(n):
        raise DomainError("direction must be a nonzero finite vector")
    return u / n


# -- halfspaces ----------------------------------------------------------


def _exact(v) -> list:
    return [Fraction(float(x)) for x in np.asarray(v, dtype=float).ravel()]


@dataclass(frozen=True)
class HalfspaceCut:
    """``{x : <x - mu, u> <= t}`` with unit ``u``."""

    u: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "u", _unit(self.u))

    def contains(self, x, mu) -> bool:
        return float(np.dot(np.asarray(x, float) - np.asarray(mu, float), self.u)) <= self.t


@dataclass(frozen=True)
class AffineHalfspace:
    """``{x : <x, normal> <= offset}``; membership is evaluated exactly."""

    normal: np.ndarray
    offset: float
    alpha: np.ndarray
    beta: np.ndarray

    def contains(self, x) -> bool:
        # 2<x, beta-alpha> <= |beta|^2 - |alpha|^2 in exact arithmetic
        xs, a, b = _exact(x), _exact(self.alpha), _exact(self.beta)
        lhs = 2 * sum(xi * (bi - ai) for xi, ai, bi in zip(xs, a, b))
        rhs = sum(bi * bi for bi in b) - sum(ai * ai for ai in a)
        return lhs <= rhs

    def to_cut(self, mu) -> HalfspaceCut:
        n = float(np.linalg.norm(self.normal))
        u = self.normal / n
        return HalfspaceCut(u, self.offset / n - float(np.dot(mu, u)))


def quad_regime_halfspace(alpha, beta) -> AffineHalfspace:
    """Points closer to ``alpha`` than to ``beta``: ``<x, beta-alpha> <= (|beta|^2-|alpha|^2)/2``."""
    a = np.asarray(alpha, dtype=float).ravel()
    b = np.asarray(beta, dtype=float).ravel()
    if a.shape != b.shape:
        raise DomainError("alpha and beta must have the same dimension")
    if np.array_equal(a, b):
        raise DomainError("alpha == beta: every regime set is optimal")
    return AffineHalfspace(b - a, 0.5 * (float(b @ b) - float(a @ a)), a, b)


def cubic_region_member(x: float, y: float) -> bool:
    """Membership in ``{G(x,y) <= G(x-1,y)}`` for ``G(x,y) = (x-y)^2 + x^4`` (exact)."""
    X, Y = Fraction(float(x)), Fraction(float(y))
    return (X - Y) ** 2 + X**4 <= (X - 1 - Y) ** 2 + (X - 1) ** 4


def cubic_epigraph_member(x: float, y: float) -> bool:
    X, Y = Fraction(float(x)), Fraction(float(y))
    return Y >= 2 * X**3 - 3 * X**2 + 3 * X - 1


# -- exact reduction -----------------------------------------------------


def F_tilde(model: EllipticalModel, u, t: float) -> float:
    """Centered halfspace functional (``F`` minus ``|mu|^2``)."""
    u = _unit(u)
    su = model.sigma @ u
    q = float(u @ su)
    s = math.sqrt(q)
    p_lo, p_hi, m_lo, _ = model.z0_law.split_moments(t / s)
    tol = model.z0_law.quad_cfg.abs_tol
    if p_lo <= tol or p_hi <= tol:
        raise DegenerateRegime(f"halfspace offset {t} has probability 0 or 1")
    m = s * m_lo
    return float(su @ su) / (q * q) * m * m / (p_lo * p_hi)


def F_halfspace(model: EllipticalModel, u, t: float) -> float:
    return float(model.mu @ model.mu) + F_tilde(model, u, t)


def c0(model: EllipticalModel) -> float:
    """``E[(Z0)+]``."""
    return model.z0_law.partial_mean(0.0, "upper")


def rayleigh(sigma, u) -> float:
    """``u' Sigma^2 u / u' Sigma u`` (scale invariant in ``u``)."""
    u = np.asarray(u, dtype=float).ravel()
    if not np.any(u):
        raise DomainError("rayleigh needs a nonzero vector")
    su = np.asarray(sigma, dtype=float) @ u
    return float(su @ su) / float(u @ su)


@dataclass(frozen=True)
class DirectionResult:
    u_star: np.ndarray
    lambda_max: float
    value_at_zero: float
    c0: float

    def to_dict(self) -> dict:
        return {
            "u_star": [float(x) for x in self.u_star],
            "lambda_max": float(self.lambda_max),
            "c0": float(self.c0),
            "value_at_zero": float(self.value_at_zero),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def best_direction(model: EllipticalModel) -> DirectionResult:
    """Top eigenvector of ``Sigma`` and the optimal centered value ``4 c0^2 lambda_max``."""
    vals, vecs = jacobi_eigh(model.sigma)
    lam = float(vals[-1])
    u = _fix_sign(vecs[:, -1] / np.linalg.norm(vecs[:, -1]))
    c = c0(model)
    value = 4.0 * c * c * lam
    direct = F_halfspace(model, u, 0.0) - float(model.mu @ model.mu)
    if abs(direct - value) > 1e-8 * max(1.0, abs(value)):
        raise ConsistencyError(f"closed form {value} disagrees with F(u*, 0) = {direct}")
    return DirectionResult(u, lam, value, c)


@dataclass(frozen=True)
class OptimalTReport:
    t_star: float
    max_value: float
    holds: bool


def optimal_t_check(model: EllipticalModel, u, grid_n: int = 201) -> OptimalTReport:
    """Maximize ``t -> F(u, t)`` through the scaled projection law.

    The log-concave solver gives the maximizer; a ``grid_n``-point scan over
    the central quantile range confirms no grid value beats it.
    """
    z = model.projection_law(u)
    if not logconcavity_probe(z, 101).is_plausibly_logconcave:
        raise NotLogConcave("projection law is not log-concave")
    res = solve_logconcave(z, check=False)
    t_star = res.threshold
    best = F_halfspace(model, u, t_star)
    grid = np.linspace(z.quantile(1e-6), z.quantile(1 - 1e-6), grid_n)
    grid_best = max(f_X(z, float(t)) for t in grid)
    holds = abs(t_star) < 1e-6 and grid_best <= res.fx_value + 1e-10 * max(1.0, res.fx_value)
    return OptimalTReport(t_star, best, holds)


# -- Monte Carlo ---------------------------------------------------------

MC_BATCH = 1 << 16


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("REGIMESPLIT_THREADS", "1")))
    except ValueError:
        return 1


def _gaussian_batches(model: EllipticalModel, n: int, seed: int):
    """Batches of ``N(mu, Sigma)`` draws; batch ``i`` uses substream ``i`` of ``seed``."""
    if model.kind != "gaussian":
        raise DomainError("Monte Carlo sampling is implemented for Gaussian models only")
    L = np.linalg.cholesky(model.sigma)
    sizes = [MC_BATCH] * (n // MC_BATCH) + ([n % MC_BATCH] if n % MC_BATCH else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def draw(args):
        size, ss = args
        z = np.random.Generator(np.random.PCG64(ss)).standard_normal((size, model.dim))
        return model.mu + z @ L.T

    workers = min(_threads(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(draw, zip(sizes, streams)))
    return [draw(a) for a in zip(sizes, streams)]


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    n: int


def F_mc(model: EllipticalModel, u, t: float, n: int = 200_000, seed: int = 0) -> MCEstimate:
    """Plug-in Monte Carlo estimate of ``F(u, t)`` with a delta-method standard error."""
    if n < 1000:
        raise DomainError("F_mc needs n >= 1000")
    u = _unit(u)
    X = np.concatenate(_gaussian_batches(model, n, seed))
    ind = ((X - model.mu) @ u <= t).astype(float)
    p = ind.mean()
    if p == 0.0 or p == 1.0:
        raise DegenerateRegime("sampled halfspace probability is 0 or 1")
    XA = X * ind[:, None]
    XB = X - XA
    a, b = XA.mean(axis=0), XB.mean(axis=0)
    value = float(a @ a / p + b @ b / (1.0 - p))
    # influence function of (a, b, p) -> F
    ga, gb = 2.0 * a / p, 2.0 * b / (1.0 - p)
    gp = -float(a @ a) / p**2 + float(b @ b) / (1.0 - p) ** 2
    infl = (XA - a) @ ga + (XB - b) @ gb + gp * (ind - p)
    se = float(infl.std(ddof=1)) / math.sqrt(n)
    return MCEstimate(value, se, n)


@dataclass(frozen=True)
class RegressionCheck:
    slope: float
    std_error: float
    expected: float

    @property
    def z_score(self) -> float:
        return (self.slope - self.expected) / self.std_error


def regression_slope_mc(model: EllipticalModel, u, v, n: int = 200_000, seed: int = 0) -> RegressionCheck:
    """OLS slope of ``<X, u>`` on ``<X, v>`` versus ``u'Sigma v / v'Sigma v``."""
    u = np.asarray(u, float).ravel()
    v = np.asarray(v, float).ravel()
    X = np.concatenate(_gaussian_batches(model, n, seed))
    yu, yv = X @ u, X @ v
    xc, yc = yv - yv.mean(), yu - yu.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ yc) / sxx
    resid = yc - slope * xc
    se = math.sqrt(float(resid @ resid) / (n - 2) / sxx)
    expected = float(u @ model.sigma @ v) / float(v @ model.sigma @ v)
    return RegressionCheck(slope, se, expected)
