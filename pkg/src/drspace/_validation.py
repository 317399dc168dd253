"""Input validation helpers shared by the public entry points."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence

INFINITY = math.inf


def as_rational(value, name: str = "value") -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact Fraction.

    Floats are rejected: an exact instance must never silently pick up a
    binary rounding error.
    """
    if isinstance(value, bool):
        raise TypeError(f"{name} must be rational, got bool")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{name}: cannot parse {value!r} as a rational") from exc
    raise TypeError(f"{name} must be an int, Fraction or 'p/q' string, got {type(value).__name__}")


def as_scale(value, name: str = "r", exact: bool = True):
    v = as_rational(value, name) if exact else _as_real(value, name)
    if not v > 0:
        raise ValueError(f"{name} must be positive, got {v}")
    return v


def as_positive(value, name: str = "eps", exact: bool = True):
    return as_scale(value, name, exact)


def _as_real(value, name):
    if isinstance(value, str):
        return as_rational(value, name)
    if isinstance(value, Real) and not isinstance(value, bool):
        return value
    raise TypeError(f"{name} must be a real number, got {type(value).__name__}")


def check_grid(grid: Iterable, name: str = "grid", exact: bool = True, order: str | None = None) -> list:
    values = [as_scale(g, name, exact) for g in grid]
    if not values:
        raise ValueError(f"{name} must be nonempty")
    if order == "ascending" and any(a > b for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be sorted ascending")
    if order == "descending" and any(a < b for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be sorted descending")
    return values


def check_sample(points: Sequence, name: str = "sample") -> list:
    """Return the sample as a list, rejecting duplicates under ``==``."""
    pts = list(points)
    for i, p in enumerate(pts):
        for q in pts[:i]:
            if p == q:
                raise ValueError(f"{name} contains duplicate points at index {i}")
    return pts


def dyadic_grid(start=1, count: int = 21) -> list[Fraction]:
    """``start * 2**-k`` for ``k = 0 .. count-1``, descending."""
    s = as_rational(start, "start")
    return [s / 2**k for k in range(count)]


def format_value(v) -> str:
    """Render a distance exactly: ``"p/q"``, ``"inf"`` or a float repr."""
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return repr(v)
