"""Entourages restricted to a finite sample, as dense boolean matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._validation import as_positive, as_scale, check_sample
from .core import AxiomReport, MetricFamily

__all__ = [
    "Relation",
    "entourage_matrix",
    "compose",
    "invert",
    "half_step",
    "verify_half_step",
    "verify_intersection_scale",
]


@dataclass(frozen=True, eq=False)
class Relation:
    """A relation on sample indices ``0..n-1``; ``matrix[i, j]`` iff ``(x_i, x_j)`` is in it."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"relation matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "Relation":
        return cls(np.eye(n, dtype=bool))

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "Relation":
        m = np.zeros((n, n), dtype=bool)
        for i, j in pairs:
            m[i, j] = True
        return cls(m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.matrix))]

    def issubset(self, other: "Relation") -> bool:
        _same_size(self, other)
        return not np.any(self.matrix & ~other.matrix)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.array_equal(self.matrix, other.matrix))

    def __and__(self, other: "Relation") -> "Relation":
        _same_size(self, other)
        return Relation(self.matrix & other.matrix)

    def contains_diagonal(self) -> bool:
        return bool(np.all(np.diag(self.matrix)))

    def dump(self) -> str:
        """``n <size>`` then one ``i j`` line per related pair."""
        lines = [f"n {self.n}"] + [f"{i} {j}" for i, j in self.pairs()]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "Relation":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("n "):
            raise ValueError("relation dump must start with 'n <size>'")
        n = int(lines[0].split()[1])
        pairs = []
        for ln in lines[1:]:
            i, j = (int(t) for t in ln.split())
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"index out of range in {ln!r}")
            pairs.append((i, j))
        return cls.from_pairs(n, pairs)


def _same_size(a: Relation, b: Relation) -> None:
    if a.n != b.n:
        raise ValueError(f"relations live on samples of different sizes ({a.n} vs {b.n})")


def entourage_matrix(fam: MetricFamily, sample: Sequence, r, eps) -> Relation:
    """``{(i, j) : d_r(x_i, x_j) < eps}``."""
    r = as_scale(r, "r", fam.exact)
    eps = as_positive(eps, "eps", fam.exact)
    n = len(sample)
    m = np.zeros((n, n), dtype=bool)
    for i, x in enumerate(sample):
        for j, y in enumerate(sample):
            m[i, j] = fam.within(x, y, r, eps)
    return Relation(m)


def compose(U: Relation, V: Relation) -> Relation:
    """``{(x, z) : (x, y) in U and (y, z) in V for some y}`` (first hop in ``U``)."""
    _same_size(U, V)
    prod = U.matrix.astype(np.int64) @ V.matrix.astype(np.int64)
    return Relation(prod > 0)


def invert(U: Relation) -> Relation:
    return Relation(U.matrix.T)


def half_step(r, eps):
    """Scale and radius whose entourage composes with itself into ``U_{r,eps}``."""
    if not (r > 0 and eps > 0):
        raise ValueError("r and eps must be positive")
    return 3 * r, min(eps / 2, r)


def verify_half_step(fam: MetricFamily, sample: Sequence, r, eps) -> AxiomReport:
    sample = check_sample(sample)
    r = as_scale(r, "r", fam.exact)
    eps = as_positive(eps, "eps", fam.exact)
    r2, eps2 = half_step(r, eps)
    U = entourage_matrix(fam, sample, r, eps)
    V = entourage_matrix(fam, sample, r2, eps2)
    return _inclusion_report("half-step", compose(V, V), U, {"r": r, "eps": eps, "r'": r2, "eps'": eps2})


def verify_intersection_scale(fam: MetricFamily, sample: Sequence, first, second) -> AxiomReport:
    """``U_{r1+r2, min(eps1, eps2)}`` inside ``U_{r1,eps1} ∩ U_{r2,eps2}``."""
    sample = check_sample(sample)
    (r1, e1), (r2, e2) = first, second
    left = entourage_matrix(fam, sample, r1 + r2, min(e1, e2))
    right = entourage_matrix(fam, sample, r1, e1) & entourage_matrix(fam, sample, r2, e2)
    return _inclusion_report("intersection-scale", left, right, {"first": first, "second": second})


def _inclusion_report(name: str, inner: Relation, outer: Relation, details: dict) -> AxiomReport:
    rep = AxiomReport(name, details=dict(details))
    rep.checked = int(inner.matrix.sum())
    bad = np.argwhere(inner.matrix & ~outer.matrix)
    if len(bad):
        i, j = (int(v) for v in bad[0])
        rep.verdict = "fail"
        rep.failed = len(bad)
        rep.witness = {"i": i, "j": j}
    return rep
