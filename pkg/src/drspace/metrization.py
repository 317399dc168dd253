"""Chain construction of a quasi-pseudo-metric from a scale-indexed family.

Levels are the entourages ``W_n = U_{9**n, 3**-n}``. The step function
``g`` is ``2**-k`` when a pair lies in ``W_1 .. W_k`` but not ``W_{k+1}``,
and ``d`` is the cheapest chain of ``g`` hops. On a finite sample the
chains only pass through sampled points, so ``d`` bounds the chain
infimum over the whole space from above; the sandwich
``g/2 <= d <= g`` still holds because its lower half is proved for every
chain.

Membership "for all n" is truncated at ``n_max``: pairs related at every
computed level get ``g = 0`` and are flagged *saturated*. Their true ``g``
is only known to be at most ``2**-n_max``, so chains pay that much for a
saturated hop. Charging 0 instead would let chains of saturated hops
undercut ``g/2`` on pairs that are not saturated.

All values are dyadic and handled as integers in units of ``2**-n_max``,
so every comparison here is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample, format_value
from .core import AxiomReport, MetricFamily
from .uniformity import Relation, compose, entourage_matrix

__all__ = [
    "ChainLevels",
    "GMatrix",
    "ChainMetric",
    "level_scale",
    "build_levels",
    "g_value",
    "g_matrix",
    "chain_metric",
    "verify_sandwich",
    "verify_triple_inclusion",
    "verify_quasi_pseudo_metric",
    "verify_level_inclusions",
    "ChainMetrizer",
]


def level_scale(n: int) -> tuple[int, Fraction]:
    """``(r, eps)`` of level ``n``: ``(3**(2n), 3**-n)``."""
    if n < 0:
        raise ValueError("level index must be >= 0")
    return 3 ** (2 * n), Fraction(1, 3**n)


@dataclass(frozen=True)
class ChainLevels:
    n_max: int
    relations: tuple  # W_0 .. W_{n_max}

    @property
    def n(self) -> int:
        return self.relations[0].n

    def __getitem__(self, k: int) -> Relation:
        return self.relations[k]


@dataclass(frozen=True)
class GMatrix:
    """``g`` in integer units of ``2**-n_max`` plus the saturation mask."""

    units: np.ndarray
    saturated: np.ndarray
    n_max: int

    @property
    def scale(self) -> int:
        return 2**self.n_max

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.units[i, j]), self.scale)

    def arc_weights(self) -> np.ndarray:
        """Chain cost of each hop: ``g``, with saturated off-diagonal hops charged one unit."""
        w = np.where(self.saturated, 1, self.units).astype(np.int64)
        np.fill_diagonal(w, 0)
        return w


@dataclass(frozen=True)
class ChainMetric:
    """Shortest-chain distances in integer units of ``2**-n_max``."""

    units: np.ndarray
    n_max: int

    @property
    def scale(self) -> int:
        return 2**self.n_max

    @property
    def n(self) -> int:
        return self.units.shape[0]

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.units[i, j]), self.scale)

    def to_fractions(self) -> list[list[Fraction]]:
        return [[self.value(i, j) for j in range(self.n)] for i in range(self.n)]

    def dump(self) -> str:
        """Full matrix, one row per line, headed by ``n_max`` and the sample size."""
        lines = [f"# n_max {self.n_max} n {self.n}"]
        for row in self.to_fractions():
            lines.append(" ".join(format_value(v) for v in row))
        return "\n".join(lines) + "\n"


def build_levels(fam: MetricFamily, sample: Sequence, n_max: int = 8) -> ChainLevels:
    if int(n_max) != n_max or n_max < 1:
        raise ValueError("n_max must be an integer >= 1")
    sample = check_sample(sample)
    rels = tuple(entourage_matrix(fam, sample, *level_scale(n)) for n in range(n_max + 1))
    return ChainLevels(int(n_max), rels)


def _depth(levels: ChainLevels) -> np.ndarray:
    """Number of consecutive levels ``W_1, W_2, ...`` containing each pair."""
    n = levels.n
    depth = np.zeros((n, n), dtype=np.int64)
    alive = np.ones((n, n), dtype=bool)
    for k in range(1, levels.n_max + 1):
        alive &= levels[k].matrix
        depth += alive
    return depth


def g_matrix(levels: ChainLevels) -> GMatrix:
    if levels.n_max < 2:
        raise ValueError("g needs n_max >= 2")
    depth = _depth(levels)
    K = levels.n_max
    saturated = depth == K
    units = np.where(saturated, 0, 2 ** (K - depth)).astype(np.int64)
    return GMatrix(units, saturated, levels.n_max)


def g_value(levels: ChainLevels, i: int, j: int) -> Fraction:
    """``1`` outside ``W_1``; ``2**-k`` for membership exactly through ``W_k``; ``0`` if saturated."""
    return g_matrix(levels).value(i, j)


def _floyd_warshall(w: np.ndarray) -> np.ndarray:
    d = w.copy()
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def chain_metric(levels: ChainLevels) -> ChainMetric:
    g = g_matrix(levels)
    return ChainMetric(_floyd_warshall(g.arc_weights()), levels.n_max)


def verify_sandwich(levels: ChainLevels, metric: ChainMetric) -> AxiomReport:
    """``g/2 <= d <= g`` exactly on every ordered pair.

    Saturated pairs have an unknown true ``g`` of at most ``2**-n_max``;
    there only ``d <= 2**-n_max`` is checked and the pair is counted in
    ``details["saturated"]``.
    """
    g = g_matrix(levels)
    rep = AxiomReport("sandwich")
    n = metric.n
    sat = 0
    for i in range(n):
        for j in range(n):
            gi, di = int(g.units[i, j]), int(metric.units[i, j])
            if g.saturated[i, j] and i != j:
                sat += 1
                rep.record(di <= 1, {"i": i, "j": j, "d": metric.value(i, j), "saturated": True})
                continue
            rep.record(gi <= 2 * di and di <= gi, {"i": i, "j": j, "g": g.value(i, j), "d": metric.value(i, j)})
    rep.details["saturated"] = sat
    if sat:
        rep.notes.append(f"{sat} off-diagonal pairs related at every computed level (g capped at 0)")
    return rep


def verify_triple_inclusion(levels: ChainLevels) -> AxiomReport:
    """``W_{n+1} ∘ W_{n+1} ∘ W_{n+1}`` inside ``W_n`` for ``n = 0 .. n_max-1``."""
    rep = AxiomReport("triple-inclusion")
    for n in range(levels.n_max):
        w = levels[n + 1]
        triple = compose(compose(w, w), w)
        bad = np.argwhere(triple.matrix & ~levels[n].matrix)
        rep.record(len(bad) == 0, {"n": n, "pair": tuple(int(v) for v in bad[0])} if len(bad) else None)
    return rep


def verify_quasi_pseudo_metric(metric) -> AxiomReport:
    """``d(x,x) = 0`` and ``d(x,z) <= d(x,y) + d(y,z)`` on all triples, exactly.

    Accepts a :class:`ChainMetric` or any square matrix of exact numbers.
    """
    if isinstance(metric, ChainMetric):
        d = metric.units
    else:
        d = np.array(metric, dtype=object)
    rep = AxiomReport("quasi-pseudo-metric")
    n = d.shape[0]
    for i in range(n):
        rep.record(d[i, i] == 0, {"x": i, "d(x,x)": d[i, i]})
    for i in range(n):
        for j in range(n):
            for k in range(n):
                rep.record(d[i, k] <= d[i, j] + d[j, k], {"x": i, "y": j, "z": k})
    return rep


def verify_level_inclusions(levels: ChainLevels, metric: ChainMetric) -> AxiomReport:
    """Finite form of "``d`` induces the same quasi-uniformity".

    ``{d < 2**-(k+1)}`` inside ``W_k`` for ``k <= n_max-1`` and ``W_k``
    inside ``{d < eps}`` whenever ``2**-k < eps`` (tested with
    ``eps = 2**-(k-1)``, ``k >= 1``).
    """
    rep = AxiomReport("level-inclusions")
    S = metric.scale
    d = metric.units
    for k in range(levels.n_max):
        small = d * 2 ** (k + 1) < S
        bad = np.argwhere(small & ~levels[k].matrix)
        rep.record(len(bad) == 0, {"direction": "V in W", "k": k} if len(bad) else None)
    for k in range(1, levels.n_max):
        inside = d * 2 ** (k - 1) < S
        bad = np.argwhere(levels[k].matrix & ~inside)
        rep.record(len(bad) == 0, {"direction": "W in V", "k": k} if len(bad) else None)
    return rep


class ChainMetrizer(BaseEstimator):
    """Fit the chain quasi-pseudo-metric of a family on a sample.

    Parameters
    ----------
    family : MetricFamily
        Scale-indexed family evaluated on the sample.
    n_max : int, default=8
        Deepest level computed; ``g`` takes values down to ``2**-(n_max-1)``
        and saturated hops cost ``2**-n_max``.

    Attributes
    ----------
    sample_ : list
        The fitted points.
    levels_ : ChainLevels
    g_ : GMatrix
    metric_ : ChainMetric
        Exact distances; ``dist_`` holds them as floats.
    """

    def __init__(self, family=None, n_max=8):
        self.family = family
        self.n_max = n_max

    def _validate_params(self):
        if not isinstance(self.family, MetricFamily):
            raise TypeError("family must be a MetricFamily")
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError("n_max must be an integer >= 2")

    def fit(self, X, y=None):
        self._validate_params()
        self.sample_ = check_sample(X, "X")
        if not self.sample_:
            raise ValueError("X must contain at least one point")
        self.levels_ = build_levels(self.family, self.sample_, self.n_max)
        self.g_ = g_matrix(self.levels_)
        self.metric_ = chain_metric(self.levels_)
        self.dist_ = self.metric_.units / self.metric_.scale
        self.n_features_in_ = len(self.sample_)
        return self

    def _arc_units(self, x, y) -> int:
        if x == y:
            return 0
        depth = 0
        for k in range(1, self.n_max + 1):
            if not self.family.within(x, y, *level_scale(k)):
                break
            depth += 1
        return 2 ** (self.n_max - depth) if depth < self.n_max else 1

    def transform(self, X):
        """Chain distances from each point of ``X`` to every fitted point.

        Chains may pass through the fitted sample; returns floats of shape
        ``(len(X), n_fitted)``.
        """
        check_is_fitted(self, "metric_")
        d = self.metric_.units
        rows = []
        for x in X:
            direct = np.array([self._arc_units(x, s) for s in self.sample_], dtype=np.int64)
            rows.append(np.min(direct[:, None] + d, axis=0))
        return np.array(rows, dtype=np.int64).reshape(len(rows), len(self.sample_)) / self.metric_.scale

    def fit_transform(self, X, y=None):
        return self.fit(X).dist_.copy()
