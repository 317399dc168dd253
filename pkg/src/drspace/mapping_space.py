"""Continuous maps of the line, as piecewise-linear functions with exact sups.

``d_r(f, g)`` is the supremum of ``|f - g|`` over the closed window
``[-r, r]`` around the base point 0. For piecewise-linear data the
difference is piecewise linear, so the supremum is attained at a
breakpoint of either function or at ``±r`` and is an exact rational.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

from ._validation import as_positive, as_rational, as_scale, check_grid
from .core import AxiomReport, MetricFamily

__all__ = [
    "PiecewiseLinearMap",
    "constant",
    "dr_sup",
    "range_on",
    "mapping_family",
    "audit_full_triangle",
    "compact_open_witness_forward",
    "compact_open_witness_backward",
    "parse_pl",
    "read_pl",
    "format_pl",
]


@dataclass(frozen=True, eq=False)
class PiecewiseLinearMap:
    """Linear interpolation through ``(xs[i], ys[i])``, constant outside ``[xs[0], xs[-1]]``."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(as_rational(x, "breakpoint") for x in self.xs)
        ys = tuple(as_rational(y, "value") for y in self.ys)
        if not xs or len(xs) != len(ys):
            raise ValueError("need the same nonzero number of breakpoints and values")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points: Iterable[tuple]) -> "PiecewiseLinearMap":
        pts = list(points)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts))

    def __call__(self, x) -> Fraction:
        x = as_rational(x, "x")
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, x) - 1
        x0, x1 = xs[i], xs[i + 1]
        return ys[i] + (ys[i + 1] - ys[i]) * (x - x0) / (x1 - x0)

    def canonical(self) -> tuple:
        """Breakpoints with collinear interior points removed; equal maps agree here."""
        pts = list(zip(self.xs, self.ys))
        while len(pts) > 1 and pts[0][1] == pts[1][1]:
            pts.pop(0)
        while len(pts) > 1 and pts[-1][1] == pts[-2][1]:
            pts.pop()
        out = [pts[0]]
        for k in range(1, len(pts) - 1):
            (xa, ya), (xb, yb), (xc, yc) = out[-1], pts[k], pts[k + 1]
            if (yb - ya) * (xc - xb) != (yc - yb) * (xb - xa):
                out.append(pts[k])
        if len(pts) > 1:
            out.append(pts[-1])
        if len(out) > 1 and all(y == out[0][1] for _, y in out):
            out = [(Fraction(0), out[0][1])]
        if len(out) == 1:
            out = [(Fraction(0), out[0][1])]
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinearMap):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def lipschitz(self) -> Fraction:
        slopes = [abs((b - a) / (x1 - x0)) for a, b, x0, x1 in zip(self.ys, self.ys[1:], self.xs, self.xs[1:])]
        return max(slopes, default=Fraction(0))

    def __str__(self):
        pts = " ".join(f"({_fmt(x)},{_fmt(y)})" for x, y in self.canonical())
        return f"PL[{pts}]"

    __repr__ = __str__


def _fmt(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def constant(c) -> PiecewiseLinearMap:
    return PiecewiseLinearMap((0,), (c,))


def _critical_points(maps: Sequence[PiecewiseLinearMap], lo: Fraction, hi: Fraction) -> list[Fraction]:
    pts = {lo, hi}
    for f in maps:
        pts.update(x for x in f.xs if lo < x < hi)
    return sorted(pts)


def dr_sup(f: PiecewiseLinearMap, g: PiecewiseLinearMap, r) -> Fraction:
    """Exact ``max |f(x) - g(x)|`` over ``x`` in ``[-r, r]``."""
    r = as_scale(r, "r")
    return max(abs(f(x) - g(x)) for x in _critical_points((f, g), -r, r))


def range_on(f: PiecewiseLinearMap, lo, hi) -> tuple[Fraction, Fraction]:
    """Exact ``(min, max)`` of ``f`` over the closed interval ``[lo, hi]``."""
    lo, hi = as_rational(lo, "lo"), as_rational(hi, "hi")
    if lo > hi:
        raise ValueError("need lo <= hi")
    values = [f(x) for x in _critical_points((f,), lo, hi)]
    return min(values), max(values)


def mapping_family(name: str = "mapping-space") -> MetricFamily:
    return MetricFamily(dr_sup, name=name, symmetric=True, triangle="full", nondegenerate=True, exact=True)


def audit_full_triangle(sample: Sequence[PiecewiseLinearMap], r_grid, triples: Iterable | None = None) -> AxiomReport:
    """``d_r(f, h) <= d_r(f, g) + d_r(g, h)`` on sampled triples (all triples by default)."""
    rs = check_grid(r_grid, "r_grid")
    rep = AxiomReport("full-triangle")
    if triples is None:
        triples = product(sample, repeat=3)
    for f, g, h in triples:
        for r in rs:
            lhs, a, b = dr_sup(f, h, r), dr_sup(f, g, r), dr_sup(g, h, r)
            rep.record(lhs <= a + b, {"f": f, "g": g, "h": h, "r": r, "lhs": lhs, "d_fg": a, "d_gh": b})
    return rep


def compact_open_witness_forward(f: PiecewiseLinearMap, K, U, sample: Iterable[PiecewiseLinearMap]) -> AxiomReport:
    """A ``d_r`` neighbourhood of ``f`` inside the compact-open set ``{g : g(K) ⊂ U}``.

    ``K = (k_lo, k_hi)`` is closed, ``U = (u_lo, u_hi)`` is open. The radius
    ``r`` covers ``K``; ``eps`` is half the gap between ``f(K)`` and the
    complement of ``U``.
    """
    k_lo, k_hi = (as_rational(v, "K") for v in K)
    u_lo, u_hi = (as_rational(v, "U") for v in U)
    rep = AxiomReport("compact-open-forward")
    f_min, f_max = range_on(f, k_lo, k_hi)
    if not (u_lo < f_min and f_max < u_hi):
        rep.verdict = "skipped"
        rep.notes.append("precondition violated: f(K) is not inside U")
        return rep
    r = max(abs(k_lo), abs(k_hi)) or Fraction(1)
    eps = min(f_min - u_lo, u_hi - f_max) / 2
    rep.details.update(r=r, eps=eps)
    for g in sample:
        if not dr_sup(f, g, r) < eps:
            rep.vacuous += 1
            continue
        g_min, g_max = range_on(g, k_lo, k_hi)
        rep.record(u_lo < g_min and g_max < u_hi, {"g": g, "g(K)": (g_min, g_max)})
    return rep


def _boxes(f: PiecewiseLinearMap, r: Fraction, eps: Fraction) -> list[tuple]:
    """Closed pieces of ``[-r, r]`` where ``f`` stays within ``eps/2`` of its midpoint value."""
    lip = f.lipschitz()
    if lip == 0:
        n = 1
    else:
        # midpoint distance at most h/2, so lip * h / 2 < eps / 2
        n = math.floor(2 * r * lip / eps) + 1
    h = 2 * r / n
    boxes = []
    for i in range(n):
        lo, hi = -r + i * h, -r + (i + 1) * h
        c = f((lo + hi) / 2)
        boxes.append((lo, hi, c - eps / 2, c + eps / 2))
    return boxes


def compact_open_witness_backward(f: PiecewiseLinearMap, r, eps, sample: Iterable[PiecewiseLinearMap]) -> AxiomReport:
    """Finitely many compact-open boxes around ``f`` inside ``N_{r,eps}(f)``.

    Each box asks ``g`` to send a closed piece of ``[-r, r]`` into the open
    ``eps/2``-ball around ``f``'s value at the piece's midpoint. Sampled ``g``
    in every box must satisfy ``d_r(f, g) < eps``.
    """
    r = as_scale(r, "r")
    eps = as_positive(eps, "eps")
    boxes = _boxes(f, r, eps)
    rep = AxiomReport("compact-open-backward")
    rep.details["boxes"] = len(boxes)
    for g in sample:
        inside = True
        for lo, hi, v_lo, v_hi in boxes:
            g_min, g_max = range_on(g, lo, hi)
            if not (v_lo < g_min and g_max < v_hi):
                inside = False
                break
        if not inside:
            rep.vacuous += 1
            continue
        d = dr_sup(f, g, r)
        rep.record(d < eps, {"g": g, "d_r": d, "eps": eps})
    return rep


def parse_pl(text: str) -> PiecewiseLinearMap:
    """Lines ``x y`` with rational entries (``p/q``), sorted by ``x``."""
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'x y', got {raw!r}")
        pts.append((as_rational(parts[0], f"line {lineno}"), as_rational(parts[1], f"line {lineno}")))
    if not pts:
        raise ValueError("no breakpoints")
    return PiecewiseLinearMap.from_points(pts)


def read_pl(path) -> PiecewiseLinearMap:
    return parse_pl(Path(path).read_text(encoding="utf-8"))


def format_pl(f: PiecewiseLinearMap) -> str:
    return "".join(f"{_fmt(x)} {_fmt(y)}\n" for x, y in zip(f.xs, f.ys))
