"""Plot checks for parametrizations into spaces carrying a family ``d_r``.

A parametrization ``p`` is smooth at ``t0`` when, near ``t0``, the map
``t -> d_r(p(t0), p(t))`` is continuous and ``t -> d_r(p(t1), p(t))`` is
smooth at ``t0`` for every ``t1`` off the fibre of ``p(t0)``. Neither
property is decidable from samples: continuity is probed by grid
refinement, smoothness by exact central finite differences that must stay
stable under step halving.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from ._validation import INFINITY, as_positive, as_rational, as_scale, check_grid, format_value
from .core import AxiomReport, MetricFamily, _jsonable
from .mapping_space import PiecewiseLinearMap, mapping_family
from .tiling import Tiling1D, dr_tiling, lambda_T, tiling_family, translate, valid_translations

__all__ = [
    "Polynomial",
    "Parametrization",
    "tiling_translation",
    "mapping_path",
    "PlotCheckReport",
    "check_plot_at",
    "translation_plot_identity",
    "URecovery",
    "UniquenessViolation",
    "recover_u",
    "continuity_witness",
]


class UniquenessViolation(RuntimeError):
    """More than one matching translation shorter than the rigidity constant."""


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with rational coefficients, constant term first."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rational(c, "coefficient") for c in self.coeffs))

    def __call__(self, t) -> Fraction:
        t = as_rational(t, "t")
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


@dataclass(frozen=True)
class Parametrization:
    """A map from the open interval ``domain`` into the points of ``family``."""

    evaluate: Callable[[Fraction], Any]
    domain: tuple
    family: MetricFamily
    kind: str = "generic"
    base: Any = None
    path: Callable | None = None

    def __call__(self, t):
        t = as_rational(t, "t")
        a, b = self.domain
        if not a < t < b:
            raise ValueError(f"t={t} outside the domain ({a}, {b})")
        return self.evaluate(t)

    def distance(self, s, t, r):
        return self.family(self(s), self(t), r)


def tiling_translation(T1: Tiling1D, path: Callable, domain, rho=None) -> Parametrization:
    """``t -> T1 + path(t)``; ``path`` maps rationals to rationals."""
    a, b = (as_rational(v, "domain") for v in domain)
    return Parametrization(
        lambda t: translate(T1, path(t)),
        (a, b),
        tiling_family(rho),
        kind="tiling-translation",
        base=T1,
        path=path,
    )


def mapping_path(xs: Sequence, value_paths: Sequence[Callable], domain) -> Parametrization:
    """``t -> f_t`` with breakpoints ``xs`` and values ``value_paths[k](t)``."""
    if len(xs) != len(value_paths):
        raise ValueError("one value path per breakpoint")
    a, b = (as_rational(v, "domain") for v in domain)
    xs = tuple(as_rational(x, "breakpoint") for x in xs)
    return Parametrization(
        lambda t: PiecewiseLinearMap(xs, tuple(v(t) for v in value_paths)),
        (a, b),
        mapping_family(),
        kind="mapping-path",
    )


@dataclass
class PlotCheckReport:
    t0: Fraction
    delta: Fraction
    fd_steps: list
    per_r: dict = field(default_factory=dict)
    coverage: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v["continuity"] == "pass" and v["smoothness"] in ("pass", "vacuous") for v in self.per_r.values())

    def summary(self) -> str:
        lines = [f"plot check at t0={format_value(self.t0)} delta={format_value(self.delta)}: {'PASS' if self.passed else 'FAIL'}"]
        for r, v in self.per_r.items():
            lines.append(f"  r={format_value(r)}: continuity={v['continuity']} smoothness={v['smoothness']}")
        lines.append(
            f"  sampled t1: {self.coverage.get('used', 0)} used, {self.coverage.get('in_fibre', 0)} in fibre, "
            f"{self.coverage.get('too_close', 0)} too close to t0 (sampled check, not a proof)"
        )
        for w in self.witnesses[:3]:
            lines.append("  witness: " + ", ".join(f"{k}={v}" for k, v in _jsonable(w).items()))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "t0": self.t0,
                "delta": self.delta,
                "fd_steps": self.fd_steps,
                "passed": self.passed,
                "per_r": {format_value(r): v for r, v in self.per_r.items()},
                "coverage": self.coverage,
                "witnesses": self.witnesses,
            }
        )


def _default_t_grid(t0, delta, n=16):
    return [t0 + delta * Fraction(k, n) for k in range(-n + 1, n)]


def _continuity_probe(phi: Callable, ts: list) -> tuple[bool, dict | None]:
    """Fit a slope bound on ``ts`` and check it on a 4x refined grid (factor 2 slack)."""
    values = [phi(t) for t in ts]
    if any(v == INFINITY for v in values):
        t_bad = ts[[v == INFINITY for v in values].index(True)]
        return False, {"t": t_bad, "value": "inf"}
    slope = max(abs(b - a) / (tb - ta) for a, b, ta, tb in zip(values, values[1:], ts, ts[1:]))
    for ta, tb in zip(ts, ts[1:]):
        fine = [ta + (tb - ta) * Fraction(k, 4) for k in range(5)]
        fv = [phi(t) for t in fine]
        for (sa, va), (sb, vb) in zip(zip(fine, fv), zip(fine[1:], fv[1:])):
            if vb == INFINITY or va == INFINITY or abs(vb - va) > 2 * slope * (sb - sa):
                return False, {"t": sa, "t'": sb, "jump": vb - va if vb != INFINITY else "inf", "slope_bound": slope}
    return True, None


_STENCILS = {
    1: ((1, Fraction(1, 2)), (-1, Fraction(-1, 2))),
    2: ((1, 1), (0, -2), (-1, 1)),
    3: ((2, Fraction(1, 2)), (1, -1), (-1, 1), (-2, Fraction(-1, 2))),
}


def _central_difference(h: Callable, t0, s, order: int):
    total = Fraction(0)
    for k, w in _STENCILS[order]:
        v = h(t0 + k * s)
        if v == INFINITY:
            return INFINITY
        total += w * v
    return total / s**order


def _fd_stable(h: Callable, t0, steps: list, rtol) -> tuple[bool, dict | None]:
    for order in (1, 2, 3):
        ests = [_central_difference(h, t0, s, order) for s in steps]
        for (sa, a), (sb, b) in zip(zip(steps, ests), zip(steps[1:], ests[1:])):
            if a == INFINITY or b == INFINITY:
                return False, {"order": order, "step": sa, "estimate": "inf"}
            if abs(a - b) > rtol * max(abs(a), abs(b), 1):
                return False, {"order": order, "step": sa, "next_step": sb, "estimate": a, "next_estimate": b}
    return True, None


def check_plot_at(
    p: Parametrization,
    t0,
    delta,
    r_grid=(1, 5, 20),
    t_grid=None,
    fd_steps=(Fraction(1, 1000), Fraction(1, 2000), Fraction(1, 4000)),
    rtol=Fraction(1, 10**4),
) -> PlotCheckReport:
    """Probe both plot conditions at ``t0`` on ``(t0 - delta, t0 + delta)``."""
    t0 = as_rational(t0, "t0")
    delta = as_positive(delta, "delta")
    a, b = p.domain
    if not (a <= t0 - delta and t0 + delta <= b):
        raise ValueError("(t0 - delta, t0 + delta) must lie inside the domain")
    rs = check_grid(r_grid, "r_grid")
    steps = check_grid(fd_steps, "fd_steps", order="descending")
    if len(steps) < 2:
        raise ValueError("need at least two finite-difference steps")
    if not 2 * steps[0] < delta:
        raise ValueError("finite-difference stencil (t0 ± 2*step) must fit inside the delta ball")
    ts = sorted(set(as_rational(t, "t") for t in (t_grid or _default_t_grid(t0, delta))) | {t0})
    if any(not t0 - delta < t < t0 + delta for t in ts):
        raise ValueError("t_grid must lie inside (t0 - delta, t0 + delta)")
    if len(ts) < 3:
        raise ValueError("t_grid needs at least two points besides t0")

    rep = PlotCheckReport(t0, delta, list(steps))
    x0 = p(t0)
    t1s, in_fibre, too_close = [], 0, 0
    for t in ts:
        if t == t0:
            continue
        if p(t) == x0:
            in_fibre += 1
        elif abs(t - t0) <= 2 * steps[0]:
            too_close += 1
        else:
            t1s.append(t)
    rep.coverage = {"used": len(t1s), "in_fibre": in_fibre, "too_close": too_close}

    for r in rs:
        cont_ok, cont_w = _continuity_probe(lambda t: p.family(x0, p(t), r), ts)
        entry = {"continuity": "pass" if cont_ok else "fail"}
        if cont_w:
            rep.witnesses.append({"condition": "continuity", "r": r, **cont_w})
        if not t1s:
            entry["smoothness"] = "vacuous"
        else:
            entry["smoothness"] = "pass"
            for t1 in t1s:
                x1 = p(t1)
                ok, w = _fd_stable(lambda t: p.family(x1, p(t), r), t0, steps, rtol)
                if not ok:
                    entry["smoothness"] = "fail"
                    rep.witnesses.append({"condition": "smoothness", "r": r, "t1": t1, **w})
                    break
        rep.per_r[r] = entry
    return rep


def translation_plot_identity(T1: Tiling1D, t0, r, grid) -> AxiomReport:
    """``d_r(T1 + t0, T1 + t) == |t0 - t|`` for grid points within ``lambda_T / 2`` of ``t0``."""
    t0 = as_rational(t0, "t0")
    r = as_scale(r, "r")
    lam = lambda_T(T1)
    rep = AxiomReport("translation-identity")
    base = translate(T1, t0)
    for t in grid:
        t = as_rational(t, "t")
        if not abs(t - t0) < lam / 2:
            raise ValueError(f"grid point {t} is not within lambda_T/2 = {lam / 2} of t0")
        d = dr_tiling(base, translate(T1, t), r)
        rep.record(d == abs(t0 - t), {"t": t, "d_r": d, "expected": abs(t0 - t)})
    return rep


@dataclass
class URecovery:
    table: list
    report: AxiomReport

    def to_csv(self) -> str:
        return "t,u\n" + "".join(f"{format_value(t)},{format_value(u)}\n" for t, u in self.table)


def recover_u(p: Parametrization, t0, grid, rho=None, r_values=(1, 5, 20)) -> URecovery:
    """Recover the unique short translation ``u(t)`` with ``p(t0) + u(t) = p(t)``.

    Checks that ``u(t) = path(t) - path(t0)`` exactly and that the same
    ``u`` is found at every scale in ``r_values``.
    """
    if p.kind != "tiling-translation":
        raise TypeError("recover_u needs a tiling-translation parametrization")
    t0 = as_rational(t0, "t0")
    lam = lambda_T(p.base)
    x0 = p(t0)
    rep = AxiomReport("u-recovery")
    table = []
    for t in grid:
        t = as_rational(t, "t")
        xt = p(t)
        found = []
        for r in r_values:
            short = [u for u in valid_translations(x0, xt, r, rho) if abs(u) < lam]
            if len(short) > 1:
                raise UniquenessViolation(f"t={t}, r={r}: several translations shorter than lambda_T: {short}")
            found.append(short[0] if short else None)
        u = found[0]
        expected = p.path(t) - p.path(t0)
        rep.record(
            u is not None and all(v == u for v in found) and u == expected,
            {"t": t, "u_by_r": found, "expected": expected},
        )
        table.append((t, u))
    return URecovery(table, rep)


def continuity_witness(p: Parametrization, t0, r, eps, delta_grid=None, n_samples: int = 16) -> AxiomReport:
    """Largest grid ``delta`` with ``d_r(p(t0), p(t)) < eps`` on sampled ``|t - t0| < delta``."""
    t0 = as_rational(t0, "t0")
    r = as_scale(r, "r")
    eps = as_positive(eps, "eps")
    a, b = p.domain
    room = min(t0 - a, b - t0)
    if delta_grid is None:
        delta_grid = [room / 2**k for k in range(21)]
    deltas = check_grid(delta_grid, "delta_grid", order="descending")
    x0 = p(t0)
    rep = AxiomReport("continuity-witness")
    for delta in deltas:
        if delta > room:
            continue
        ts = [t0 + delta * Fraction(k, n_samples) for k in range(-n_samples + 1, n_samples)]
        if all(p.family.within(x0, p(t), r, eps) for t in ts):
            rep.checked = len(ts)
            rep.details["delta"] = delta
            return rep
    rep.record(False, {"t0": t0, "r": r, "eps": eps, "smallest_delta": deltas[-1]})
    rep.notes.append("no delta found on the grid (bounded search, not a disproof)")
    return rep
