"""Optimal two-level (one threshold) least-squares approximation in one dimension.

For a threshold ``c`` the best levels are the conditional means
``alpha = E[X | X <= c]`` and ``beta = E[X | X > c]``; the remaining error is
``E[X^2] - f_X(c)`` with::

    f_X(t) = E[X, X <= t]^2 / P(X <= t) + E[X, X > t]^2 / P(X > t)

so the best threshold maximizes ``f_X``.  Its derivative is
``p(t) (beta - alpha) (alpha + beta - 2t)``; the sign factor
``alpha + beta - 2t`` equals residual life minus inactivity time, the "m/k
gap" used by the log-concave solver.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import optimize

from .density import Density1D, EmpiricalDist, logconcavity_probe
from .exceptions import BracketFailure, DegenerateRegime, DomainError, NotLogConcave
from .inequality import inactivity_time, residual_life

Law = Union[Density1D, EmpiricalDist]

METHODS = ("logconcave_bisection", "global_grid", "empirical_exact")


@dataclass(frozen=True)
class SplitResult:
    thresholds: tuple
    alpha: float
    beta: float
    objective: float
    fx_value: float
    method: str

    @property
    def threshold(self) -> float:
        return self.thresholds[0]

    def to_dict(self) -> dict:
        return {
            "thresholds": [float(t) for t in self.thresholds],
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "objective": float(self.objective),
            "fx_value": float(self.fx_value),
            "method": self.method,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["threshold", "alpha", "beta", "objective", "fx_value", "method"])
        for t in self.thresholds:
            w.writerow([repr(float(t)), repr(self.alpha), repr(self.beta), repr(self.objective), repr(self.fx_value), self.method])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> "SplitResult":
        if data.get("method") not in METHODS:
            raise DomainError(f"unknown method {data.get('method')!r}")
        if not data.get("thresholds"):
            raise DomainError("thresholds must be a nonempty list")
        return cls(tuple(float(t) for t in data["thresholds"]), float(data["alpha"]), float(data["beta"]),
                   float(data["objective"]), float(data["fx_value"]), data["method"])


def _degenerate(law: Law, p: float) -> bool:
    tol = law.quad_cfg.abs_tol if isinstance(law, Density1D) else 0.0
    return p <= tol


def f_X(law: Law, t: float) -> float:
    """Split functional ``f_X(t)``; equals ``mean**2`` where one side is empty."""
    p_lo, p_hi, m_lo, m_hi = law.split_moments(t)
    if _degenerate(law, p_lo) or _degenerate(law, p_hi):
        return law.mean**2
    return m_lo * m_lo / p_lo + m_hi * m_hi / p_hi


def conditional_levels(law: Law, c: float):
    """``(E[X | X <= c], E[X | X > c])``."""
    p_lo, p_hi, m_lo, m_hi = law.split_moments(c)
    if _degenerate(law, p_lo) or _degenerate(law, p_hi):
        raise DegenerateRegime(f"threshold {c} leaves one regime with zero probability")
    return m_lo / p_lo, m_hi / p_hi


def reduced_objective(law: Law, c: float) -> float:
    """Minimal mean squared error at threshold ``c`` (levels optimized)."""
    if isinstance(law, EmpiricalDist):
        return empirical_objective(law, c)
    return law.second_moment - f_X(law, c)


def mk_gap(d: Density1D, t: float) -> float:
    """Residual life minus inactivity time at ``t``.

    Both quantities are translation covariant, so evaluating them on ``X``
    at ``t`` is the same as on the centered law at ``t - mean``.  Zero
    exactly at the stationary points of ``f_X``.
    """
    if isinstance(d, EmpiricalDist):
        a, b = conditional_levels(d, t)
        return a + b - 2.0 * t
    return residual_life(d, t) - inactivity_time(d, t)


# -- solvers -------------------------------------------------------------


def _finish(law: Law, thresholds: Sequence[float], method: str) -> SplitResult:
    # levels are recomputed from partial moments so the result is self-checking
    c = thresholds[0]
    alpha, beta = conditional_levels(law, c)
    fx = f_X(law, c)
    return SplitResult(tuple(float(t) for t in thresholds), alpha, beta, law.second_moment - fx, fx, method)


def _bracket(gap: Callable[[float], float], start: float, step: float, lo: float, hi: float):
    g0 = gap(start)
    if g0 == 0.0:
        return start, start
    direction = 1.0 if g0 > 0 else -1.0
    a, width = start, step
    for _ in range(200):
        b = a + direction * width
        b = min(max(b, lo), hi)
        gb = gap(b)
        if gb == 0.0 or (gb > 0) != (g0 > 0):
            return (a, b) if a < b else (b, a)
        if b in (lo, hi):
            break
        a, width = b, 2.0 * width
    raise BracketFailure("stationarity gap keeps its sign over the whole quantile range")


def solve_logconcave(d: Density1D, *, check: bool = True, xtol: float = 1e-12) -> SplitResult:
    """Unique maximizer of ``f_X`` for a log-concave law (root of the m/k gap).

    Set ``check=False`` to skip the log-concavity probe and force this path.
    """
    if check and not logconcavity_probe(d, 101).is_plausibly_logconcave:
        raise NotLogConcave(f"{d.name} fails the log-concavity probe; use solve_global")
    lo, hi = d.quantile(1e-12), d.quantile(1.0 - 1e-12)
    gap = lambda t: mk_gap(d, t)  # noqa: E731
    mu = d.mean
    a, b = _bracket(gap, mu, d.std, lo, hi)
    c = a if a == b else optimize.brentq(gap, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)
    return _finish(d, [c], "logconcave_bisection")


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-10):
    """Golden-section search for a maximum of a unimodal ``fn`` on ``[a, b]``."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def _polish(d: Density1D, t: float, a: float, b: float) -> float:
    # sharpen a golden-section estimate with the exact stationarity condition
    try:
        g_a, g_b = mk_gap(d, a), mk_gap(d, b)
    except DegenerateRegime:
        return t
    if not g_a > 0 > g_b:
        return t
    root = optimize.brentq(lambda s: mk_gap(d, s), a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    f_root, f_t = f_X(d, root), f_X(d, t)
    return root if f_root >= f_t - 1e-12 * max(abs(f_t), 1.0) else t


def solve_global(d: Density1D, grid_n: int = 512, tie_tol: float = 1e-9) -> SplitResult:
    """All global maximizers of ``f_X`` (within a relative tie tolerance).

    Grid scan over the central ``[1e-9, 1 - 1e-9]`` quantile range, then
    golden-section refinement of every local maximum.
    """
    if grid_n < 64:
        raise DomainError("solve_global needs grid_n >= 64")
    ts = np.linspace(d.quantile(1e-9), d.quantile(1.0 - 1e-9), grid_n)
    fs = np.array([f_X(d, float(t)) for t in ts])
    cands = []
    for i in range(grid_n):
        left = fs[i - 1] if i > 0 else -math.inf
        right = fs[i + 1] if i < grid_n - 1 else -math.inf
        if fs[i] >= left and fs[i] >= right:
            a, b = float(ts[max(i - 1, 0)]), float(ts[min(i + 1, grid_n - 1)])
            t, _ = golden_max(lambda s: f_X(d, s), a, b, 1e-10)
            t = _polish(d, t, a, b)
            cands.append((t, f_X(d, t)))
    best = max(f for _, f in cands)
    keep = sorted(t for t, f in cands if f >= best - tie_tol * max(abs(best), 1.0))
    merged = []
    for t in keep:
        if merged and abs(t - merged[-1]) < 1e-7 * max(1.0, abs(t)):
            continue
        merged.append(t)
    return _finish(d, merged, "global_grid")


# -- empirical exact oracle ----------------------------------------------


def empirical_objective(e: EmpiricalDist, c: float) -> float:
    """Per-unit-mass squared error of the best two-level fit with split at ``c``."""
    x, w = e.values, e.weights
    mask = x <= c
    err = 0.0
    for sel in (mask, ~mask):
        if sel.any():
            ws, xs = w[sel], x[sel]
            m = np.dot(ws, xs) / ws.sum()
            err += float(np.dot(ws, (xs - m) ** 2))
    return err / e.total_weight


def solve_empirical(e: EmpiricalDist, tie_rtol: float = 1e-12) -> SplitResult:
    """Exact optimum over all splits between consecutive atoms (prefix sums).

    Thresholds are gap midpoints; every tied split is reported.
    """
    if len(e) < 2:
        raise DomainError("solve_empirical needs at least 2 distinct atoms")
    x, w = e.values, e.weights
    W = e.total_weight
    xbar = float(np.dot(w, x)) / W
    xc = x - xbar
    cw = np.cumsum(w)[:-1]
    cs = np.cumsum(w * xc)[:-1]
    # centered split gain: S^2 / W_lo + S^2 / W_hi with S the lower centered sum
    gain = cs * cs * (1.0 / cw + 1.0 / (W - cw))
    best = float(gain.max())
    idx = np.flatnonzero(gain >= best - tie_rtol * max(best, np.finfo(float).tiny))
    mids = [0.5 * (x[i] + x[i + 1]) for i in idx]
    sse = float(np.dot(w, xc * xc))
    objective = max(sse - best, 0.0) / W
    i = idx[0]
    alpha = float(np.dot(w[: i + 1], x[: i + 1]) / cw[i])
    beta = float(np.dot(w[i + 1 :], x[i + 1 :]) / (W - cw[i]))
    return SplitResult(tuple(float(m) for m in mids), alpha, beta, objective, e.second_moment - objective,
                       "empirical_exact")


# -- general convex loss: regime boundary --------------------------------


@dataclass(frozen=True)
class BoundaryReport:
    """Shape of ``{x : G(x - alpha) <= G(x - beta)}``.

    ``kind`` is ``halfline_left`` (``x <= boundary``), ``halfline_right``
    (``x >= boundary``, when ``alpha > beta``), ``empty`` or ``all``.  ``u0``
    is the crossing of ``H(u) = G(u + delta) - G(u)``, ``delta = |beta - alpha|``.
    """

    kind: str
    u0: float | None = None
    boundary: float | None = None

    def contains(self, x: float) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "empty":
            return False
        return x <= self.boundary if self.kind == "halfline_left" else x >= self.boundary


def regime_boundary_convex_1d(G: Callable[[float], float], alpha: float, beta: float,
                              search=(-1e6, 1e6), tol: float = 1e-12) -> BoundaryReport:
    if alpha == beta:
        raise DomainError("alpha == beta: every regime set is optimal")
    swapped = alpha > beta
    lo_lvl, hi_lvl = (beta, alpha) if swapped else (alpha, beta)
    delta = hi_lvl - lo_lvl

    def H(u):
        return G(u + delta) - G(u)

    # u = x - hi_lvl puts {G(x - lo) <= G(x - hi)} at {H(u) <= 0}
    a, b = search[0] - hi_lvl, search[1] - hi_lvl
    ha, hb = H(a) <= 0, H(b) <= 0
    if ha and hb:
        kind = "all"
    elif not ha and not hb:
        kind = "empty"
    else:
        while b - a > tol * max(1.0, abs(a), abs(b)):
            m = 0.5 * (a + b)
            if m in (a, b):
                break
            if H(m) <= 0:
                a = m
            else:
                b = m
        u0 = 0.5 * (a + b)
        x0 = u0 + hi_lvl
        if not swapped:
            return BoundaryReport("halfline_left", u0, x0)
        # alpha > beta: the set {G(x-alpha) <= G(x-beta)} is the complement side
        return BoundaryReport("halfline_right", u0, x0)
    if swapped:
        kind = {"all": "empty", "empty": "all"}[kind]
    return BoundaryReport(kind)


# -- sweeps --------------------------------------------------------------


@dataclass(frozen=True)
class SweepTable:
    rows: tuple = field(default_factory=tuple)  # (t, fx, mk_gap or None, cdf)

    def __post_init__(self):
        ts = [r[0] for r in self.rows]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("sweep rows must be strictly increasing in t")

    @property
    def t(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows])

    @property
    def fx(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "fx", "mk_gap", "cdf"])
        for t, fx, gap, p in self.rows:
            w.writerow([repr(float(t)), repr(float(fx)), "" if gap is None else repr(float(gap)), repr(float(p))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"rows": [{"t": t, "fx": fx, "mk_gap": gap, "cdf": p} for t, fx, gap, p in self.rows]}


def _sweep_row(d: Density1D, t: float):
    try:
        gap = mk_gap(d, t)
    except DegenerateRegime:
        gap = None
    return (t, f_X(d, t), gap, d.cdf(t))


def sweep(d: Density1D, t_lo: float, t_hi: float, n: int, workers: int = 1) -> SweepTable:
    """``f_X``, m/k gap and CDF on an evenly spaced grid."""
    if not t_lo < t_hi:
        raise DomainError("sweep needs t_lo < t_hi")
    if n < 2:
        raise DomainError("sweep needs n >= 2")
    ts = [float(t) for t in np.linspace(t_lo, t_hi, n)]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _sweep_row(d, t), ts))
    else:
        rows = [_sweep_row(d, t) for t in ts]
    return SweepTable(tuple(rows))
