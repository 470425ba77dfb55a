"""Exact rational convex-polygon moments, vertical clipping and the cut functional R(t).

Everything here uses :class:`fractions.Fraction`; floats only appear when a
value is rendered for display.  For ``X`` uniform on a polygon ``P``::

    R(t) = |int_{P, x>t} (x, y) dA|^2 / (Area(P, x>t) * Area(P, x<t))
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DegenerateCut, DegeneratePolygon, DomainError

Point = tuple  # (Fraction, Fraction)


def as_rational(v) -> Fraction:
    """Exact conversion: ints, Fractions, floats (binary-exact) and strings like ``"3/2"``."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        return Fraction(float(v))
    try:
        return Fraction(str(v).strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a rational number: {v!r}") from None


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _cleanup(pts: list) -> list:
    """Drop repeated and collinear vertices (exact)."""
    out = []
    for p in pts:
        if not out or p != out[-1]:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            if _cross(out[i - 1], out[i], out[(i + 1) % len(out)]) == 0:
                out.pop(i)
                changed = True
                break
    return out


@dataclass(frozen=True)
class ConvexPolygon:
    """Counterclockwise convex polygon with exact rational vertices."""

    vertices: tuple

    def __post_init__(self):
        pts = _cleanup([(as_rational(x), as_rational(y)) for x, y in self.vertices])
        if len(pts) < 3:
            raise DegeneratePolygon("polygon needs at least three non-collinear vertices")
        n = len(pts)
        for i in range(n):
            if _cross(pts[i - 1], pts[i], pts[(i + 1) % n]) < 0:
                raise DegeneratePolygon("vertices must be convex and listed counterclockwise")
        if _signed_area2(pts) <= 0:
            raise DegeneratePolygon("polygon has zero area")
        object.__setattr__(self, "vertices", tuple(pts))

    @classmethod
    def from_text(cls, text: str) -> "ConvexPolygon":
        """One ``x y`` pair per line (``#`` comments, blank lines ignored)."""
        pts = []
        for ln, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise DomainError(f"line {ln}: expected 'x y', got {line!r}")
            pts.append((as_rational(parts[0]), as_rational(parts[1])))
        return cls(tuple(pts))

    def to_text(self) -> str:
        return "".join(f"{x} {y}\n" for x, y in self.vertices)

    def translate(self, a, b) -> "ConvexPolygon":
        a, b = as_rational(a), as_rational(b)
        return ConvexPolygon(tuple((x + a, y + b) for x, y in self.vertices))

    @property
    def x_range(self):
        xs = [x for x, _ in self.vertices]
        return min(xs), max(xs)


def _signed_area2(pts: Sequence[Point]) -> Fraction:
    n = len(pts)
    return sum((pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n)), Fraction(0))


def area(P: ConvexPolygon) -> Fraction:
    a = abs(_signed_area2(P.vertices)) / 2
    if a == 0:
        raise DegeneratePolygon("polygon has zero area")
    return a


def first_moments(P: ConvexPolygon):
    """Exact ``(int x dA, int y dA)`` over ``P`` (Green's theorem)."""
    v = P.vertices
    n = len(v)
    mx = my = Fraction(0)
    for i in range(n):
        (x0, y0), (x1, y1) = v[i], v[(i + 1) % n]
        c = x0 * y1 - x1 * y0
        mx += (x0 + x1) * c
        my += (y0 + y1) * c
    return mx / 6, my / 6


def clip_vertical(P: ConvexPolygon, t, side: str = "x_gt") -> ConvexPolygon | None:
    """Intersection of ``P`` with ``{x > t}`` (``x_gt``) or ``{x < t}`` (``x_lt``).

    Returns ``None`` when the intersection has no area.
    """
    if side not in ("x_gt", "x_lt"):
        raise DomainError(f"side must be 'x_gt' or 'x_lt', got {side!r}")
    t = as_rational(t)
    sgn = 1 if side == "x_gt" else -1

    def inside(p):
        return sgn * (p[0] - t) >= 0

    v = P.vertices
    out = []
    for i in range(len(v)):
        cur, nxt = v[i], v[(i + 1) % len(v)]
        if inside(cur):
            out.append(cur)
        if inside(cur) != inside(nxt):
            # exact crossing with x = t
            lam = (t - cur[0]) / (nxt[0] - cur[0])
            out.append((t, cur[1] + lam * (nxt[1] - cur[1])))
    out = _cleanup(out)
    if len(out) < 3 or _signed_area2(out) == 0:
        return None
    return ConvexPolygon(tuple(out))


def R_polygon(P: ConvexPolygon, t) -> Fraction:
    """Exact cut functional ``R(t)`` for the uniform law on ``P``."""
    t = as_rational(t)
    right, left = clip_vertical(P, t, "x_gt"), clip_vertical(P, t, "x_lt")
    if right is None or left is None:
        raise DegenerateCut(f"cut x = {t} leaves one side of the polygon empty")
    mx, my = first_moments(right)
    return (mx * mx + my * my) / (area(right) * area(left))


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def R_sweep(P: ConvexPolygon, t_values: Iterable) -> list:
    """Rows ``{t, exact, decimal}`` or ``{t, error}`` per cut, in input order."""
    rows = []
    for t in t_values:
        t = as_rational(t)
        try:
            r = R_polygon(P, t)
        except DegenerateCut as exc:
            rows.append({"t": fraction_str(t), "error": f"DegenerateCut: {exc}"})
            continue
        rows.append({"t": fraction_str(t), "exact": fraction_str(r), "decimal": float(r)})
    return rows


HEXAGON = (
    ("A", (-3, 0)),
    ("B", (-1, -12)),
    ("C", (3, -8)),
    ("D", (3, 0)),
    ("E", (1, 12)),
    ("F", (-3, 8)),
)


def hexagon() -> ConvexPolygon:
    return ConvexPolygon(tuple(p for _, p in HEXAGON))


@dataclass(frozen=True)
class HexagonReport:
    area: Fraction
    moments: tuple
    r0: Fraction
    r1: Fraction
    area_ok: bool
    centered: bool
    r0_ok: bool
    r1_ok: bool
    counterexample_holds: bool

    @property
    def all_ok(self) -> bool:
        return self.area_ok and self.centered and self.r0_ok and self.r1_ok and self.counterexample_holds

    def to_dict(self) -> dict:
        return {
            "area": fraction_str(self.area),
            "moments": [fraction_str(m) for m in self.moments],
            "r0": fraction_str(self.r0),
            "r0_decimal": float(self.r0),
            "r1": fraction_str(self.r1),
            "r1_decimal": float(self.r1),
            "area_ok": self.area_ok,
            "centered": self.centered,
            "r0_ok": self.r0_ok,
            "r1_ok": self.r1_ok,
            "counterexample_holds": self.counterexample_holds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def hexagon_counterexample() -> HexagonReport:
    """Integer hexagon whose centered cut is beaten by the cut at ``x = 1``."""
    K = hexagon()
    a = area(K)
    m = first_moments(K)
    r0, r1 = R_polygon(K, 0), R_polygon(K, 1)
    return HexagonReport(
        area=a,
        moments=m,
        r0=r0,
        r1=r1,
        area_ok=a == 104,
        centered=m == (0, 0),
        r0_ok=r0 == Fraction(22045, 12168),
        r1_ok=r1 == Fraction(9389, 4995),
        counterexample_holds=r1 > r0,
    )


# -- random polygons for property checks ---------------------------------


def convex_hull(points: Iterable) -> list:
    """Andrew's monotone chain, exact, counterclockwise, collinear points dropped."""
    pts = sorted({(as_rational(x), as_rational(y)) for x, y in points})
    if len(pts) < 3:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def random_convex_polygon(rng: np.random.Generator, n_points: int = 12, box: int = 50) -> ConvexPolygon:
    """Convex hull of random integer points in ``[-box, box]^2`` (degenerate hulls redrawn)."""
    for _ in range(1000):
        pts = rng.integers(-box, box + 1, size=(n_points, 2))
        hull = convex_hull(pts.tolist())
        if len(hull) >= 3:
            try:
                return ConvexPolygon(tuple(hull))
            except DegeneratePolygon:
                continue
    raise DegeneratePolygon("could not draw a non-degenerate polygon")


def sample_uniform(P: ConvexPolygon, n: int, rng: np.random.Generator) -> np.ndarray:
    """Rejection sampling from the bounding box (float output)."""
    v = np.array([[float(x), float(y)] for x, y in P.vertices])
    lo, hi = v.min(axis=0), v.max(axis=0)
    edges = np.roll(v, -1, axis=0) - v
    out, have = [], 0
    while have < n:
        m = max(2 * (n - have), 1024)
        pts = lo + (hi - lo) * rng.random((m, 2))
        rel = pts[:, None, :] - v[None, :, :]
        cross = edges[None, :, 0] * rel[:, :, 1] - edges[None, :, 1] * rel[:, :, 0]
        ok = pts[(cross >= 0).all(axis=1)]
        out.append(ok)
        have += len(ok)
    return np.concatenate(out)[:n]
