"""Exact one-dimensional tilings of the line.

A tiling is a bi-infinite sequence of interval tiles produced by a
generator (a periodic word or the fixed point of a substitution), placed
so that the left end of tile 0 sits at ``offset``. Labels are single
characters; lengths are positive rationals. All geometry is exact: tile
boundaries are integers in units of ``1/D`` where ``D`` is the common
denominator of the prototile lengths, shifted by the rational offset.

Substitution fixed points are expanded lazily and memoized, so windows of
radius ``3**12`` and beyond are available without materializing
boundary arrays; comparisons of long label runs happen on strings.
"""
from __future__ import annotations

import math
import re
import threading
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from ._validation import INFINITY, as_positive, as_rational, as_scale, dyadic_grid
from .core import AxiomReport, MetricFamily

__all__ = [
    "GeneratorExhausted",
    "PeriodicWord",
    "SubstitutionFixedPoint",
    "Tiling1D",
    "Patch",
    "periodic_tiling",
    "substitution_tiling",
    "patch",
    "translate",
    "patches_equal",
    "valid_translations",
    "dr_tiling",
    "orbit_metric",
    "lambda_T",
    "ball_to_nbhd_witness",
    "nbhd_to_ball_witness",
    "uniqueness_check",
    "tiling_family",
    "parse_tiling",
    "read_tiling",
    "format_tiling",
    "ORBIT_CAP",
]

ORBIT_CAP = 1 / math.sqrt(2)

_BLOCK = 1024
_CHUNK = _BLOCK * 4096
_MAX_TILES = 400_000_000
_MAX_DEPTH = 200


class GeneratorExhausted(RuntimeError):
    """The generator cannot produce the requested window."""


def _check_prototiles(lengths: Mapping) -> dict[str, Fraction]:
    if not lengths:
        raise ValueError("prototile set must be nonempty")
    out = {}
    for label, length in lengths.items():
        if not isinstance(label, str) or len(label) != 1 or label.isspace() or ord(label) > 255:
            raise ValueError(f"prototile labels must be single latin-1 characters, got {label!r}")
        out[label] = as_scale(length, f"length of {label!r}")
    return out


class _Generator:
    """Label sequence indexed by all integers with integer tile lengths."""

    kind = "abstract"

    def __init__(self, lengths):
        self.lengths = _check_prototiles(lengths)
        self.unit = math.lcm(*(v.denominator for v in self.lengths.values()))
        self.ilen = {c: int(v * self.unit) for c, v in self.lengths.items()}

    # subclasses: labels(i, j), boundary(i), tile_at(pos_units), key, span
    def label(self, i: int) -> str:
        return self.labels(i, i + 1)

    def tile_at(self, pos: Fraction) -> int:
        """Index of the tile with ``boundary(i) <= pos < boundary(i+1)``."""
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, _Generator) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


class PeriodicWord(_Generator):
    kind = "periodic"

    def __init__(self, word: str, lengths):
        super().__init__(lengths)
        if not word:
            raise ValueError("periodic word must be nonempty")
        missing = set(word) - set(self.lengths)
        if missing:
            raise ValueError(f"word uses labels without prototiles: {sorted(missing)}")
        self.word = word
        self.p = len(word)
        self.cum = [0]
        for c in word:
            self.cum.append(self.cum[-1] + self.ilen[c])
        self.period_units = self.cum[-1]
        self.key = ("periodic", word, tuple(sorted(self.lengths.items())))

    @property
    def span(self) -> Fraction:
        return Fraction(self.period_units, self.unit)

    def labels(self, i: int, j: int) -> str:
        n = j - i
        if n <= 0:
            return ""
        start = i % self.p
        reps = (start + n) // self.p + 1
        return (self.word * reps)[start:start + n]

    def boundary(self, i: int) -> int:
        q, k = divmod(i, self.p)
        return q * self.period_units + self.cum[k]

    def tile_at(self, pos) -> int:
        q = math.floor(Fraction(pos) / self.period_units)
        rem = pos - q * self.period_units
        k = bisect_right(self.cum, rem) - 1
        return q * self.p + k


def _primitive_root(word: str) -> str:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def _substitute(word: str, rules: dict[str, str], times: int = 1) -> str:
    out = word
    for _ in range(times):
        out = "".join(rules[c] for c in out)
    return out


class SubstitutionFixedPoint(_Generator):
    """Bi-infinite fixed point of a power of a substitution, grown from a seed.

    The seed ``(left, right)`` must be a legal pair, i.e. ``left + right``
    occurs in some iterate of the substitution on a single letter. Tile 0
    is the first letter of the right half.
    """

    kind = "substitution"

    def __init__(self, rules: Mapping[str, str], seed: tuple[str, str], lengths, max_legal_depth: int = 12):
        super().__init__(lengths)
        rules = dict(rules)
        alphabet = set(self.lengths)
        for c, img in rules.items():
            if c not in alphabet or not img or set(img) - alphabet:
                raise ValueError(f"rule {c}->{img} uses labels without prototiles")
        if set(rules) != alphabet:
            raise ValueError("every prototile label needs exactly one substitution rule")
        left, right = seed
        if left not in alphabet or right not in alphabet:
            raise ValueError(f"seed {left}|{right} uses unknown labels")
        self.rules = rules
        self.seed = (left, right)
        self.power = self._power()
        self.key = (
            "substitution",
            tuple(sorted(rules.items())),
            self.seed,
            tuple(sorted(self.lengths.items())),
        )
        self._check_legal(max_legal_depth)
        self._fwd = str.maketrans({c: img for c, img in rules.items()})
        self._bwd = str.maketrans({c: img[::-1] for c, img in rules.items()})
        self._lut = np.zeros(256, dtype=np.int64)
        for c, v in self.ilen.items():
            self._lut[ord(c)] = v
        self._lock = threading.Lock()
        self._right = right
        self._left_rev = left
        self._ck_right = self._checkpoints(self._right)
        self._ck_left = self._checkpoints(self._left_rev)

    @property
    def span(self) -> Fraction:
        return max(self.lengths.values())

    def _power(self) -> int:
        left, right = self.seed
        for k in range(1, 4 * len(self.rules) + 1):
            img_r = _substitute(right, self.rules, k)
            img_l = _substitute(left, self.rules, k)
            if img_r[0] == right and img_l[-1] == left:
                return k
        raise ValueError(
            f"seed {left}|{right} is not fixed by any power of the substitution "
            "(needs sigma^k(right) to start with right and sigma^k(left) to end with left)"
        )

    def _check_legal(self, depth: int) -> None:
        pair = "".join(self.seed)
        for c in self.rules:
            word = c
            for _ in range(depth):
                word = _substitute(word, self.rules)
                if pair in word:
                    return
                if len(word) > 1_000_000:
                    break
        raise ValueError(f"seed pair {pair!r} never occurs in an iterate of the substitution")

    def _checkpoints(self, s: str) -> np.ndarray:
        parts = [np.zeros(1, dtype=np.int64)]
        total = 0
        for start in range(0, len(s), _CHUNK):
            chunk = np.frombuffer(s[start:start + _CHUNK].encode("latin-1"), dtype=np.uint8)
            c = np.cumsum(self._lut[chunk]) + total
            parts.append(c[_BLOCK - 1::_BLOCK])
            total = int(c[-1])
        return np.concatenate(parts)

    def _grow(self, side: str) -> None:
        """Expand one half once; fail if it does not grow."""
        with self._lock:
            if side == "right":
                before = self._right
                s = before
                for _ in range(self.power):
                    s = s.translate(self._fwd)
                if len(s) > _MAX_TILES:
                    raise GeneratorExhausted(f"requested window needs more than {_MAX_TILES} tiles on one side")
                self._right, self._ck_right = s, self._checkpoints(s)
            else:
                before = self._left_rev
                s = before
                for _ in range(self.power):
                    s = s.translate(self._bwd)
                if len(s) > _MAX_TILES:
                    raise GeneratorExhausted(f"requested window needs more than {_MAX_TILES} tiles on one side")
                self._left_rev, self._ck_left = s, self._checkpoints(s)
        if len(s) == len(before):
            raise GeneratorExhausted(f"substitution does not grow the {side} half of the seed")

    def ensure(self, i: int, j: int) -> None:
        """Grow the material to cover tile indices ``i .. j-1``."""
        for _ in range(_MAX_DEPTH):
            if len(self._right) < j:
                self._grow("right")
            elif len(self._left_rev) < -i:
                self._grow("left")
            else:
                return
        raise GeneratorExhausted("expansion depth limit reached")

    def labels(self, i: int, j: int) -> str:
        if j <= i:
            return ""
        self.ensure(i, j)
        right, left_rev = self._right, self._left_rev
        if i >= 0:
            return right[i:j]
        if j <= 0:
            return left_rev[-j:-i][::-1]
        return left_rev[:-i][::-1] + right[:j]

    def _prefix(self, s: str, ck: np.ndarray, n: int) -> int:
        b = n // _BLOCK
        start = b * _BLOCK
        return int(ck[b]) + sum(v * s.count(c, start, n) for c, v in self.ilen.items())

    def boundary(self, i: int) -> int:
        if i >= 0:
            self.ensure(0, i)
            return self._prefix(self._right, self._ck_right, i)
        self.ensure(i, 0)
        return -self._prefix(self._left_rev, self._ck_left, -i)

    def _first_reaching(self, side: str, target: int) -> int:
        """Smallest ``n`` whose length-``n`` prefix of a half reaches ``target`` units."""
        if target <= 0:
            return 0
        while True:
            s = self._right if side == "right" else self._left_rev
            ck = self._ck_right if side == "right" else self._ck_left
            b = int(np.searchsorted(ck, target, side="left"))
            start = (b - 1) * _BLOCK
            stop = min(b * _BLOCK, len(s)) if b < len(ck) else len(s)
            seg = np.frombuffer(s[start:stop].encode("latin-1"), dtype=np.uint8)
            cs = int(ck[b - 1]) + np.cumsum(self._lut[seg])
            k = int(np.searchsorted(cs, target, side="left"))
            if k < len(cs):
                return start + k + 1
            self._grow(side)

    def tile_at(self, pos) -> int:
        pos = Fraction(pos)
        if pos >= 0:
            return self._first_reaching("right", math.floor(pos) + 1) - 1
        return -self._first_reaching("left", math.ceil(-pos))


@dataclass(frozen=True)
class Tiling1D:
    """A tiling of the line: tile ``i`` covers ``[offset + B(i), offset + B(i+1)]``.

    Periodic tilings are stored in canonical form (primitive word, least
    rotation, offset reduced modulo the period), so ``==`` is equality of
    tilings as sets of tiles.
    """

    generator: _Generator
    offset: Fraction = Fraction(0)

    @property
    def prototiles(self) -> dict[str, Fraction]:
        return dict(self.generator.lengths)

    @property
    def unit(self) -> int:
        return self.generator.unit

    def left(self, i: int) -> Fraction:
        return self.offset + Fraction(self.generator.boundary(i), self.unit)

    def index_at(self, x, tie: str = "right") -> int:
        """Tile containing the point ``x``; on a boundary pick by ``tie``."""
        local = (as_rational(x, "x") - self.offset) * self.unit
        i = self.generator.tile_at(local)
        if tie == "left" and self.generator.boundary(i) == local:
            i -= 1
        return i

    def __add__(self, x):
        return translate(self, x)

    def __str__(self):
        g = self.generator
        if isinstance(g, PeriodicWord):
            desc = f"periodic {g.word}"
        else:
            desc = "substitution " + " ".join(f"{c}->{w}" for c, w in sorted(g.rules.items()))
        return f"T[{desc} @ {_fmt(self.offset)}]"

    __repr__ = __str__


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _make(generator: _Generator, offset: Fraction) -> Tiling1D:
    if isinstance(generator, PeriodicWord):
        period = generator.span
        offset = offset - math.floor(offset / period) * period
    return Tiling1D(generator, offset)


_GEN_CACHE: dict = {}
_GEN_LOCK = threading.Lock()


def _shared(generator: _Generator) -> _Generator:
    # one materialization per distinct generator
    with _GEN_LOCK:
        return _GEN_CACHE.setdefault(generator.key, generator)


def periodic_tiling(word: str, lengths: Mapping, offset=0) -> Tiling1D:
    """Periodic tiling repeating ``word``; tile ``word[0]`` starts at ``offset``."""
    lengths = _check_prototiles(lengths)
    root = _primitive_root(word)
    rotations = [root[m:] + root[:m] for m in range(len(root))]
    m = min(range(len(root)), key=lambda k: rotations[k])
    shift = sum((lengths[c] for c in root[:m]), Fraction(0))
    gen = _shared(PeriodicWord(rotations[m], lengths))
    return _make(gen, as_rational(offset, "offset") + shift)


def substitution_tiling(rules: Mapping[str, str], seed, lengths: Mapping, offset=0) -> Tiling1D:
    """Fixed-point tiling of a substitution grown from the legal pair ``seed``.

    ``seed`` is ``(left, right)`` or a string ``"a|b"``.
    """
    if isinstance(seed, str):
        left, _, right = seed.partition("|")
        seed = (left, right)
    gen = _shared(SubstitutionFixedPoint(rules, tuple(seed), lengths))
    return _make(gen, as_rational(offset, "offset"))


def translate(T: Tiling1D, x) -> Tiling1D:
    return _make(T.generator, T.offset + as_rational(x, "x"))


@dataclass(frozen=True)
class Patch:
    """Contiguous tiles as ``(left, right, label)`` triples, ordered."""

    tiles: tuple

    def __len__(self):
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)


def _window_range(T: Tiling1D, lo, hi, closed: bool) -> tuple[int, int]:
    if closed:
        return T.index_at(lo, "left"), T.index_at(hi, "right")
    return T.index_at(lo, "right"), T.index_at(hi, "left")


def patch(T: Tiling1D, r, center=0) -> Patch:
    """All tiles meeting the closed window ``[center - r, center + r]``."""
    r = as_scale(r, "r")
    c = as_rational(center, "center")
    k0, k1 = _window_range(T, c - r, c + r, closed=True)
    labels = T.generator.labels(k0, k1 + 1)
    tiles = tuple((T.left(k), T.left(k + 1), lab) for k, lab in zip(range(k0, k1 + 1), labels))
    return Patch(tiles)


def _check_compatible(A: Tiling1D, B: Tiling1D) -> None:
    if A.generator is B.generator:
        return
    la, lb = A.generator.lengths, B.generator.lengths
    for c in set(la) & set(lb):
        if la[c] != lb[c]:
            raise ValueError(f"label {c!r} has different lengths in the two tilings")


def _first_mismatch(a: str, b: str) -> int:
    """Index of the first differing character of equal-length strings, or len."""
    if a == b:
        return len(a)
    lo, hi = 0, len(a)
    while hi - lo > 64:
        mid = (lo + hi) // 2
        if a[lo:mid] == b[lo:mid]:
            lo = mid
        else:
            hi = mid
    for k in range(lo, hi):
        if a[k] != b[k]:
            return k
    return hi


def _common_run(ga: _Generator, i: int, gb: _Generator, j: int, limit: int, forward: bool = True) -> int:
    """Number of agreeing labels from ``(i, j)`` stepping forward or backward, capped."""
    if limit <= 0:
        return 0
    if ga is gb and i == j:
        return limit
    if isinstance(ga, PeriodicWord) and isinstance(gb, PeriodicWord):
        window = min(limit, math.lcm(ga.p, gb.p))
        n = _run_direct(ga, i, gb, j, window, forward)
        return limit if n == window else n
    done = 0
    step = 64
    while done < limit:
        n = min(step, limit - done)
        if forward:
            a = ga.labels(i + done, i + done + n)
            b = gb.labels(j + done, j + done + n)
        else:
            a = ga.labels(i - done - n + 1, i - done + 1)[::-1]
            b = gb.labels(j - done - n + 1, j - done + 1)[::-1]
        k = _first_mismatch(a, b)
        done += k
        if k < n:
            return done
        step = min(step * 4, 1 << 22)
    return limit


def _run_direct(ga, i, gb, j, n, forward):
    if forward:
        a, b = ga.labels(i, i + n), gb.labels(j, j + n)
    else:
        a, b = ga.labels(i - n + 1, i + 1)[::-1], gb.labels(j - n + 1, j + 1)[::-1]
    return _first_mismatch(a, b)


def patches_equal(A: Tiling1D, B: Tiling1D, lo, hi, closed: bool = True) -> bool:
    """Whether ``A`` and ``B`` have the same tiles meeting the window ``lo..hi``."""
    _check_compatible(A, B)
    a0, a1 = _window_range(A, lo, hi, closed)
    b0, b1 = _window_range(B, lo, hi, closed)
    if a1 - a0 != b1 - b0 or A.left(a0) != B.left(b0):
        return False
    n = a1 - a0 + 1
    return _common_run(A.generator, a0, B.generator, b0, n) == n


def _default_rho(T1: Tiling1D, T2: Tiling1D, r: Fraction) -> Fraction:
    return r + 2 * max(T1.generator.span, T2.generator.span)


def _candidates(T1: Tiling1D, T2: Tiling1D, r: Fraction, rho: Fraction, strict: bool) -> Iterator[Fraction]:
    """Translations ``u`` (by increasing ``|u|``) with ``(T1+u) ∩ [-r,r] = T2 ∩ [-r,r]``."""
    _check_compatible(T1, T2)
    k0, k1 = _window_range(T2, -r, r, closed=True)
    m = k1 - k0 + 1
    a = T2.left(k0)
    lab = T2.generator.label(k0)
    g1 = T1.generator
    centre = T1.index_at(a)

    def walk(j, step):
        # left(j) <= a going down from the centre tile, > a going up: |u| grows monotonically
        pos = T1.left(j)
        while True:
            u = a - pos
            if not (abs(u) < rho if strict else abs(u) <= rho):
                return
            yield u, j
            if step > 0:
                pos += g1.lengths[g1.label(j)]
                j += 1
            else:
                j -= 1
                pos -= g1.lengths[g1.label(j)]

    up, down = walk(centre + 1, 1), walk(centre, -1)
    nu, nd = next(up, None), next(down, None)
    while nu is not None or nd is not None:
        if nd is None or (nu is not None and (abs(nu[0]), nu[0]) <= (abs(nd[0]), nd[0])):
            (u, j), nu = nu, next(up, None)
        else:
            (u, j), nd = nd, next(down, None)
        if g1.label(j) != lab:
            continue
        if _common_run(g1, j, T2.generator, k0, m) == m:
            yield u


def valid_translations(T1: Tiling1D, T2: Tiling1D, r, rho=None) -> list[Fraction]:
    """All ``u`` with ``|u| <= rho`` and ``patch(T1 + u, r) == patch(T2, r)``, sorted by ``|u|``."""
    r = as_scale(r, "r")
    rho = _default_rho(T1, T2, r) if rho is None else as_positive(rho, "rho")
    return list(_candidates(T1, T2, r, rho, strict=False))


def dr_tiling(T1: Tiling1D, T2: Tiling1D, r, rho=None):
    """Least ``|u|`` matching ``T1 + u`` to ``T2`` on ``[-r, r]``.

    Returns INFINITY when no translation with ``|u| <= rho`` matches; a
    larger finite value beyond ``rho`` is then not excluded.
    """
    r = as_scale(r, "r")
    rho = _default_rho(T1, T2, r) if rho is None else as_positive(rho, "rho")
    for u in _candidates(T1, T2, r, rho, strict=False):
        return abs(u)
    return INFINITY


def _dr_below(T1, T2, r, eps) -> bool:
    r = as_scale(r, "r")
    eps = as_positive(eps, "eps")
    return next(_candidates(T1, T2, r, eps, strict=True), None) is not None


def tiling_family(rho=None, name: str = "tiling") -> MetricFamily:
    """The local-matching family ``d_r`` on tilings as a :class:`MetricFamily`."""

    def distance(x, y, r):
        return dr_tiling(x, y, r, rho)

    return MetricFamily(distance, name=name, symmetric=None, triangle="weak", nondegenerate=True, exact=True, below=_dr_below)


def _orbit_feasible(T: Tiling1D, T2: Tiling1D, eps: Fraction) -> bool:
    """Is there ``|u|, |v| < eps`` with ``T+u``, ``T2+v`` equal on the open ball of radius ``1/eps``?"""
    R = 1 / eps
    k = T2.index_at(0)
    a_k = T2.left(k)
    lab = T2.generator.label(k)
    k_lo = T2.index_at(-R - eps, "left")
    k_hi = T2.index_at(R + eps)
    cap_f = k_hi - k + 1
    cap_b = k - k_lo
    j_lo = T.index_at(a_k - 2 * eps)
    j_hi = T.index_at(a_k + 2 * eps)
    for j in range(j_lo, j_hi + 1):
        w = a_k - T.left(j)
        if abs(w) >= 2 * eps or T.generator.label(j) != lab:
            continue
        n_f = _common_run(T.generator, j, T2.generator, k, cap_f)
        n_b = _common_run(T.generator, j - 1, T2.generator, k - 1, cap_b, forward=False)
        lo_closed = None if n_b == cap_b else T2.left(k - n_b) + R
        hi_closed = None if n_f == cap_f else T2.left(k + n_f) - R
        lo_open = max(-eps, w - eps)
        hi_open = min(eps, w + eps)
        if not lo_open < hi_open:
            continue
        if lo_closed is not None and not lo_closed < hi_open:
            continue
        if hi_closed is not None and not lo_open < hi_closed:
            continue
        if lo_closed is not None and hi_closed is not None and not lo_closed <= hi_closed:
            continue
        return True
    return False


def orbit_metric(T: Tiling1D, T2: Tiling1D, tol=1e-9) -> float:
    """Two-sided translation metric, capped at ``1/sqrt(2)``.

    The smallest ``eps`` for which small translations of both tilings agree
    on the open ball of radius ``1/eps``. Validity is upward closed in
    ``eps``, so the value is found by bisection to within ``tol``; every
    feasibility test is exact.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    _check_compatible(T, T2)
    if T == T2:
        return 0.0
    hi = Fraction(ORBIT_CAP)
    lo = Fraction(0)
    if not _orbit_feasible(T, T2, hi - Fraction(tol)):
        return ORBIT_CAP
    tol = Fraction(tol)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        mid = Fraction(float(mid))  # keeps denominators small
        if mid <= lo or mid >= hi:
            break
        if _orbit_feasible(T, T2, mid):
            hi = mid
        else:
            lo = mid
    return min(float(hi), ORBIT_CAP)


def lambda_T(prototiles) -> Fraction:
    """Rigidity constant: half the shortest prototile length.

    For an interval of length ``L`` its interior meets that of its
    translate by ``v`` exactly when ``|v| < L``.
    """
    if isinstance(prototiles, Tiling1D):
        prototiles = prototiles.prototiles
    lengths = _check_prototiles(prototiles)
    return min(lengths.values()) / 2


def _largest_below(bound, grid):
    for g in sorted(grid, reverse=True):
        if g < bound:
            return g
    raise ValueError("no grid value below the bound")


def ball_to_nbhd_witness(T1: Tiling1D, r, eps, sample: Iterable[Tiling1D], grid=None, tol=1e-9) -> AxiomReport:
    """Orbit-metric ball inside the ``d_r`` neighbourhood.

    ``eps'`` is the largest grid value strictly below
    ``min(1/(r + eps/2 + max tile length), eps/2)``; every sampled ``T'``
    with ``orbit_metric(T1, T') < eps'`` must have ``d_r(T1, T') < eps``.
    """
    r = as_scale(r, "r")
    eps = as_positive(eps, "eps")
    diam = max(T1.prototiles.values())
    bound = min(1 / (r + eps / 2 + diam), eps / 2)
    eps_p = _largest_below(bound, grid or dyadic_grid(1, 40))
    rep = AxiomReport("ball-inside-neighborhood")
    rep.details.update(bound=bound, eps_prime=eps_p, r=r, eps=eps)
    for T2 in sample:
        if not orbit_metric(T1, T2, tol) < eps_p:
            rep.vacuous += 1
            continue
        ok = _dr_below(T1, T2, r, eps)
        rep.record(ok, {"T'": T2, "d_r": dr_tiling(T1, T2, r)})
    if rep.uninformative:
        rep.notes.append("no sampled tiling fell inside the ball")
    return rep


def nbhd_to_ball_witness(T1: Tiling1D, eps, sample: Iterable[Tiling1D], tol=1e-9) -> AxiomReport:
    """``d_r'`` neighbourhood with ``r' = ceil(1/eps) + 1``, ``eps' = eps/2`` inside the orbit ball."""
    eps = as_positive(eps, "eps")
    if not eps < Fraction(ORBIT_CAP):
        raise ValueError("eps must be below 1/sqrt(2)")
    r_p = math.ceil(1 / eps) + 1
    eps_p = eps / 2
    rep = AxiomReport("neighborhood-inside-ball")
    rep.details.update(r_prime=r_p, eps_prime=eps_p, eps=eps)
    for T2 in sample:
        if not _dr_below(T1, T2, r_p, eps_p):
            rep.vacuous += 1
            continue
        value = orbit_metric(T1, T2, tol)
        rep.record(value < eps, {"T'": T2, "orbit_metric": value})
    if rep.uninformative:
        rep.notes.append("no sampled tiling fell inside the neighborhood")
    return rep


def uniqueness_check(S: Tiling1D, window, u, v) -> bool:
    """For ``|u|, |v| < lambda_T``: equal patches of ``S+u`` and ``S+v`` on the window force ``u == v``."""
    u, v = as_rational(u, "u"), as_rational(v, "v")
    lam = lambda_T(S)
    if not (abs(u) < lam and abs(v) < lam):
        raise ValueError("u and v must be shorter than lambda_T")
    lo, hi = (as_rational(w, "window") for w in window)
    if lo > hi:
        raise ValueError("window must satisfy lo <= hi")
    return u == v or not patches_equal(translate(S, u), translate(S, v), lo, hi)


_SUB_RE = re.compile(r"^(\S)->(\S+)$")


def parse_tiling(text: str) -> Tiling1D:
    """Parse the plain-text tiling description.

    Lines are ``label length`` for each prototile, one generator line
    (``periodic WORD`` or ``substitution a->ab b->a seed a|a``) and an
    optional ``offset p/q``. ``#`` starts a comment.
    """
    lengths: dict[str, Fraction] = {}
    generator = None
    offset = Fraction(0)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "periodic":
            if len(rest) != 1:
                raise ValueError(f"line {lineno}: expected 'periodic WORD'")
            generator = ("periodic", rest[0])
        elif head == "substitution":
            if "seed" not in rest or rest.index("seed") != len(rest) - 2:
                raise ValueError(f"line {lineno}: expected '... seed a|b' at the end")
            rules = {}
            for tok in rest[:-2]:
                m = _SUB_RE.match(tok)
                if not m:
                    raise ValueError(f"line {lineno}: bad rule {tok!r}")
                rules[m.group(1)] = m.group(2)
            generator = ("substitution", rules, rest[-1])
        elif head == "offset":
            if len(rest) != 1:
                raise ValueError(f"line {lineno}: expected 'offset p/q'")
            offset = as_rational(rest[0], "offset")
        elif len(head) == 1 and len(rest) == 1:
            if head in lengths:
                raise ValueError(f"line {lineno}: duplicate prototile {head!r}")
            lengths[head] = as_scale(rest[0], f"line {lineno}: length")
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    if generator is None:
        raise ValueError("missing generator line")
    if generator[0] == "periodic":
        return periodic_tiling(generator[1], lengths, offset)
    _, rules, seed = generator
    if "|" not in seed:
        raise ValueError("seed must look like a|b")
    return substitution_tiling(rules, seed, lengths, offset)


def read_tiling(path) -> Tiling1D:
    return parse_tiling(Path(path).read_text(encoding="utf-8"))


def format_tiling(T: Tiling1D) -> str:
    g = T.generator
    lines = [f"{c} {_fmt(v)}" for c, v in sorted(g.lengths.items())]
    if isinstance(g, PeriodicWord):
        lines.append(f"periodic {g.word}")
    else:
        rules = " ".join(f"{c}->{w}" for c, w in sorted(g.rules.items()))
        lines.append(f"substitution {rules} seed {g.seed[0]}|{g.seed[1]}")
    lines.append(f"offset {_fmt(T.offset)}")
    return "\n".join(lines) + "\n"
