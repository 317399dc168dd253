from fractions import Fraction

import pytest
from hypothesis import settings

from drspace.tiling import periodic_tiling, substitution_tiling

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIB_RULES = {"a": "ab", "b": "a"}
UNIT = {"a": 1, "b": 1}


@pytest.fixture
def ab():
    return periodic_tiling("ab", UNIT)


@pytest.fixture
def fib():
    return substitution_tiling(FIB_RULES, "a|a", UNIT)


@pytest.fixture
def aaa():
    return periodic_tiling("a", {"a": 1})


def F(x):
    return Fraction(x)


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, desc = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {desc}")
