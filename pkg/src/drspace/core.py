"""Scale-indexed distance families and the audits for their axioms.

A family assigns to every scale ``r > 0`` a function ``d_r(x, y)`` with
values in ``[0, inf]``. Nothing here assumes the axioms hold: every
declared property is checked on finite samples and reported with a
replayable witness when it fails.

Existential clauses ("there is a delta > 0 ...") are searched over finite
grids. Not finding a value on the grid is reported as such, never as a
disproof.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from ._validation import (
    INFINITY,
    as_positive,
    as_scale,
    check_grid,
    dyadic_grid,
    format_value,
)

__all__ = [
    "INFINITY",
    "MetricFamily",
    "NeighborhoodSpec",
    "AxiomReport",
    "WitnessNotFound",
    "neighborhood_contains",
    "audit_self_distance",
    "audit_monotone_in_r",
    "audit_usc_in_r",
    "audit_weak_triangle",
    "audit_weaker_triangle",
    "audit_symmetry",
    "basis_witness",
    "verify_basis_inclusion",
    "merge_reports",
    "axiom_suite",
    "DEFAULT_DELTA_GRID",
]

DEFAULT_DELTA_GRID = dyadic_grid(1, 21)
TRIANGLE_MODES = ("weak", "weaker", "full")


class WitnessNotFound(LookupError):
    """A bounded existential search exhausted its grid.

    This is not a disproof: a suitable value may exist off the grid.
    """


@dataclass(frozen=True)
class MetricFamily:
    """A point set's scale-indexed distance ``(x, y, r) -> d_r(x, y)``.

    The flags are claims to be audited. ``below`` is an optional fast path
    deciding ``d_r(x, y) < eps`` without computing the exact value; it must
    agree with ``distance``.
    """

    distance: Callable[[Any, Any, Any], Any]
    name: str = "family"
    symmetric: bool | None = None
    triangle: str = "weak"
    nondegenerate: bool | None = None
    exact: bool = True
    tol: float = 1e-9
    below: Callable[[Any, Any, Any, Any], bool] | None = None

    def __post_init__(self):
        if self.triangle not in TRIANGLE_MODES:
            raise ValueError(f"triangle must be one of {TRIANGLE_MODES}, got {self.triangle!r}")
        if not self.exact and not self.tol >= 0:
            raise ValueError("tol must be nonnegative")

    def __call__(self, x, y, r):
        return self.distance(x, y, r)

    def within(self, x, y, r, eps) -> bool:
        """``d_r(x, y) < eps``, strict; INFINITY is never below anything."""
        if self.below is not None:
            return bool(self.below(x, y, r, eps))
        return self.lt(self.distance(x, y, r), eps)

    # comparisons honouring the arithmetic mode
    def le(self, a, b) -> bool:
        if math.isinf(a):
            return math.isinf(b)
        if self.exact:
            return a <= b
        return a <= b + self.tol

    def lt(self, a, b) -> bool:
        if math.isinf(a):
            return False
        return a < b

    def eq(self, a, b) -> bool:
        if math.isinf(a) or math.isinf(b):
            return math.isinf(a) and math.isinf(b)
        if self.exact:
            return a == b
        return abs(a - b) <= self.tol

    def is_zero(self, a) -> bool:
        return self.eq(a, 0)


@dataclass(frozen=True)
class NeighborhoodSpec:
    center: Any
    r: Any
    eps: Any

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")


@dataclass
class AxiomReport:
    """Outcome of one audit.

    ``verdict`` is ``"pass"``, ``"fail"`` or ``"skipped"``. A failing report
    always carries ``witness``: the offending points, scales and values.
    Triangle audits tally guarded tuples whose guard did not hold as
    ``vacuous``; a report where nothing was actually checked is flagged
    ``uninformative``.
    """

    axiom: str
    verdict: str = "pass"
    witness: dict | None = None
    checked: int = 0
    vacuous: int = 0
    failed: int = 0
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def uninformative(self) -> bool:
        return self.verdict == "pass" and self.checked == 0

    def record(self, ok: bool, witness: dict | None = None) -> None:
        self.checked += 1
        if not ok:
            self.failed += 1
            self.verdict = "fail"
            if self.witness is None:
                self.witness = witness or {}

    def summary(self) -> str:
        line = f"{self.axiom}: {self.verdict.upper()} (checked={self.checked}"
        if self.vacuous:
            line += f", vacuous={self.vacuous}"
        if self.failed:
            line += f", failed={self.failed}"
        line += ")"
        if self.uninformative:
            line += " [uninformative: nothing checked]"
        for note in self.notes:
            line += f"\n  note: {note}"
        if self.witness is not None and self.verdict == "fail":
            line += "\n  witness: " + ", ".join(f"{k}={_jsonable(v)}" for k, v in self.witness.items())
        return line

    def to_dict(self) -> dict:
        out = {
            "axiom": self.axiom,
            "verdict": self.verdict,
            "checked": self.checked,
            "vacuous": self.vacuous,
            "failed": self.failed,
            "uninformative": self.uninformative,
            "notes": list(self.notes),
            "witness": _jsonable(self.witness),
            "details": _jsonable(self.details),
        }
        return out


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, (Fraction, float)):
        return format_value(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


def neighborhood_contains(fam: MetricFamily, n: NeighborhoodSpec, y) -> bool:
    return fam.within(n.center, y, n.r, n.eps)


def _scales(fam, r_grid, order=None):
    return check_grid(r_grid, "r_grid", exact=fam.exact, order=order)


def audit_self_distance(fam: MetricFamily, sample: Sequence, r_grid: Iterable) -> AxiomReport:
    if not sample:
        raise ValueError("sample must be nonempty")
    rs = _scales(fam, r_grid)
    rep = AxiomReport("self-distance")
    for x in sample:
        for r in rs:
            v = fam(x, x, r)
            rep.record(fam.is_zero(v), {"x": x, "r": r, "d_r(x,x)": v})
    return rep


def audit_monotone_in_r(fam: MetricFamily, pairs: Iterable, r_grid: Iterable) -> AxiomReport:
    rs = _scales(fam, r_grid, order="ascending")
    rep = AxiomReport("monotone-in-r")
    for x, y in pairs:
        values = [fam(x, y, r) for r in rs]
        for (r1, v1), (r2, v2) in zip(zip(rs, values), zip(rs[1:], values[1:])):
            rep.record(fam.le(v1, v2), {"x": x, "y": y, "r1": r1, "r2": r2, "d_r1": v1, "d_r2": v2})
    return rep


def audit_usc_in_r(fam: MetricFamily, x, y, r, eps, delta_grid: Iterable = DEFAULT_DELTA_GRID) -> AxiomReport:
    """Search ``delta`` (largest first) with ``d_{r+delta}(x, y) < eps``."""
    r = as_scale(r, "r", fam.exact)
    eps = as_positive(eps, "eps", fam.exact)
    deltas = check_grid(delta_grid, "delta_grid", fam.exact, order="descending")
    rep = AxiomReport("usc-in-r")
    if not fam.within(x, y, r, eps):
        rep.verdict = "skipped"
        rep.notes.append("precondition d_r(x,y) < eps does not hold")
        return rep
    for delta in deltas:
        if fam.within(x, y, r + delta, eps):
            rep.checked = 1
            rep.details["delta"] = delta
            return rep
    rep.record(False, {"x": x, "y": y, "r": r, "eps": eps, "smallest_delta_tried": deltas[-1]})
    rep.notes.append("no delta found on the grid (bounded search, not a disproof)")
    return rep


def _triangle_audit(name, fam, triples, scales, weaker):
    r1, r2, r3 = (as_scale(s, n, fam.exact) for s, n in zip(scales, ("r1", "r2", "r3")))
    r12, r123 = r1 + r2, r1 + r2 + r3
    r_xy = r123 if weaker else r12
    rep = AxiomReport(name)
    rep.details["scales"] = (r1, r2, r3)
    for x, y, z in triples:
        dxy = fam(x, y, r_xy)
        dyz = fam(y, z, r123)
        if not (fam.lt(dxy, r3) and fam.lt(dyz, r2)):
            rep.vacuous += 1
            continue
        dxz = fam(x, z, r1)
        rhs = dxy + dyz
        rep.record(
            fam.le(dxz, rhs),
            {"x": x, "y": y, "z": z, "r1": r1, "r2": r2, "r3": r3, "lhs": dxz, "d_xy": dxy, "d_yz": dyz},
        )
    if rep.uninformative and rep.vacuous:
        rep.notes.append("every tuple was vacuous (guard failed); the audit is uninformative")
    return rep


def audit_weak_triangle(fam: MetricFamily, triples: Iterable, scales) -> AxiomReport:
    """Guarded inequality ``d_{r1}(x,z) <= d_{r1+r2}(x,y) + d_{r1+r2+r3}(y,z)``.

    The guard is ``d_{r1+r2}(x,y) < r3`` and ``d_{r1+r2+r3}(y,z) < r2``.
    """
    return _triangle_audit("weak-triangle", fam, triples, scales, weaker=False)


def audit_weaker_triangle(fam: MetricFamily, triples: Iterable, scales) -> AxiomReport:
    """As :func:`audit_weak_triangle` with ``d_{r1+r2+r3}(x,y)`` in guard and sum."""
    return _triangle_audit("weaker-triangle", fam, triples, scales, weaker=True)


def audit_symmetry(fam: MetricFamily, pairs: Iterable, r_grid: Iterable) -> AxiomReport:
    rs = _scales(fam, r_grid)
    rep = AxiomReport("symmetry")
    for x, y in pairs:
        for r in rs:
            a, b = fam(x, y, r), fam(y, x, r)
            rep.record(fam.eq(a, b), {"x": x, "y": y, "r": r, "d_r(x,y)": a, "d_r(y,x)": b})
    return rep


def basis_witness(fam: MetricFamily, x, y, r, eps, delta_grid=DEFAULT_DELTA_GRID, eps1_grid=None):
    """Return ``(r', eps')`` with ``N_{r',eps'}(y)`` inside ``N_{r,eps}(x)``.

    Searches ``delta`` and ``eps1`` with ``d_{r+delta}(x,y) < eps - eps1``
    and returns ``eps' = min(delta, eps1)``, ``r' = r + delta + eps - eps1``.
    Raises :class:`WitnessNotFound` when the grids are exhausted.
    """
    r = as_scale(r, "r", fam.exact)
    eps = as_positive(eps, "eps", fam.exact)
    if not fam.within(x, y, r, eps):
        raise ValueError("precondition violated: d_r(x, y) must be < eps")
    deltas = check_grid(delta_grid, "delta_grid", fam.exact, order="descending")
    if eps1_grid is None:
        eps1s = [eps / 2**k for k in range(1, 21)]
    else:
        eps1s = check_grid(eps1_grid, "eps1_grid", fam.exact)
    for delta in deltas:
        for eps1 in eps1s:
            if eps1 >= eps:
                continue
            if fam.within(x, y, r + delta, eps - eps1):
                return r + delta + eps - eps1, min(delta, eps1)
    raise WitnessNotFound(
        "no (delta, eps1) found on the grids; bounded search, the witness may exist off-grid"
    )


def verify_basis_inclusion(fam: MetricFamily, x, y, r, eps, r_prime, eps_prime, sample: Iterable) -> AxiomReport:
    """Every sampled ``z`` with ``d_{r'}(y,z) < eps'`` has ``d_r(x,z) <= eps``."""
    rep = AxiomReport("basis-inclusion")
    for z in sample:
        if not fam.within(y, z, r_prime, eps_prime):
            rep.vacuous += 1
            continue
        v = fam(x, z, r)
        rep.record(fam.le(v, eps), {"z": z, "d_r(x,z)": v, "eps": eps})
    return rep


def merge_reports(axiom: str, reports: Iterable[AxiomReport]) -> AxiomReport:
    """Sum the tallies of several reports; the first failing witness is kept."""
    out = AxiomReport(axiom)
    for rep in reports:
        out.checked += rep.checked
        out.vacuous += rep.vacuous
        out.failed += rep.failed
        if rep.verdict == "fail" and out.verdict != "fail":
            out.verdict = "fail"
            out.witness = rep.witness
        out.notes.extend(n for n in rep.notes if n not in out.notes)
    if out.uninformative and out.vacuous:
        note = "every tuple was vacuous (guard failed); the audit is uninformative"
        if note not in out.notes:
            out.notes.append(note)
    return out


def axiom_suite(
    fam: MetricFamily,
    sample: Sequence,
    n_triples: int = 500,
    r_grid: Iterable = (1, 2, 4, 8),
    seed: int = 0,
    usc_margin=Fraction(1, 10),
) -> list[AxiomReport]:
    """Run every axiom audit on seeded random triples drawn from ``sample``.

    Each triple gets its own random ``(r1, r2, r3)`` from ``r_grid``; pairs
    ``(x, y)`` and ``(y, z)`` of the triples feed the pairwise audits. The
    usc search starts from ``eps = d_r(x, y) + usc_margin`` on finite values.
    """
    if not sample:
        raise ValueError("sample must be nonempty")
    rs = _scales(fam, r_grid, order="ascending")
    rng = random.Random(seed)
    triples, scales = [], []
    for _ in range(n_triples):
        triples.append(tuple(rng.choice(sample) for _ in range(3)))
        scales.append(tuple(rng.choice(rs) for _ in range(3)))
    pairs = [(x, y) for x, y, _ in triples] + [(y, z) for _, y, z in triples]

    reports = [audit_self_distance(fam, sample, rs), audit_monotone_in_r(fam, pairs, rs)]
    usc = []
    for (x, y), r in zip(pairs, (rng.choice(rs) for _ in pairs)):
        v = fam(x, y, r)
        if v == INFINITY:
            continue
        usc.append(audit_usc_in_r(fam, x, y, r, v + usc_margin))
    reports.append(merge_reports("usc-in-r", usc))

    groups: dict = {}
    for t, sc in zip(triples, scales):
        groups.setdefault(sc, []).append(t)
    for name, audit in (("weak-triangle", audit_weak_triangle), ("weaker-triangle", audit_weaker_triangle)):
        reports.append(merge_reports(name, [audit(fam, ts, sc) for sc, ts in sorted(groups.items())]))
    sym = audit_symmetry(fam, pairs, rs)
    if fam.symmetric is None:
        sym.details["enforced"] = False
        if not sym.passed:
            sym.notes.append("symmetry is not claimed for this family; recorded, not enforced")
    reports.append(sym)
    return reports
