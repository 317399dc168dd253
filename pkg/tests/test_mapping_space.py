from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

import oracles
from drspace.core import audit_monotone_in_r, audit_symmetry, axiom_suite
from drspace.mapping_space import (
    PiecewiseLinearMap,
    audit_full_triangle,
    compact_open_witness_backward,
    compact_open_witness_forward,
    constant,
    dr_sup,
    format_pl,
    mapping_family,
    parse_pl,
    range_on,
)

q = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@st.composite
def pl_maps(draw, max_points=6):
    xs = sorted(draw(st.sets(q, min_size=1, max_size=max_points)))
    ys = [draw(q) for _ in xs]
    return PiecewiseLinearMap(tuple(xs), tuple(ys))


def test_evaluation_and_extrapolation():
    f = PiecewiseLinearMap((0, 2), (0, 4))
    assert f(1) == 2 and f(F(1, 2)) == 1
    assert f(-7) == 0 and f(9) == 4


def test_dr_examples():
    f = PiecewiseLinearMap((0, 1), (1, 3))
    assert dr_sup(f, f, 3) == 0
    for r in (F(1, 3), 1, 10):
        assert dr_sup(constant(0), constant(F(-5, 2)), r) == F(5, 2)
    assert dr_sup(constant(0), PiecewiseLinearMap((-10, 10), (-10, 10)), 2) == 2


@given(pl_maps(), pl_maps(), st.sampled_from([F(1, 2), 1, 3, 7]))
def test_dr_matches_grid_oracle(f, g, r):
    exact = dr_sup(f, g, r)
    approx = oracles.grid_sup(f.xs, f.ys, g.xs, g.ys, r)
    lip = float(max(f.lipschitz(), g.lipschitz()))
    resolution = 2 * lip * 2 * float(r) / (10_000 - 1) + 1e-12
    assert approx <= float(exact) + 1e-12
    assert float(exact) - approx <= resolution


@given(pl_maps(), pl_maps(), pl_maps(), st.sampled_from([1, 2, 5]))
def test_full_triangle_property(f, g, h, r):
    assert dr_sup(f, h, r) <= dr_sup(f, g, r) + dr_sup(g, h, r)
    assert dr_sup(f, g, r) == dr_sup(g, f, r)


def test_full_triangle_examples():
    assert audit_full_triangle([constant(0), constant(1), constant(3)], [1]).passed
    f = PiecewiseLinearMap((0, 1), (0, 1))
    assert audit_full_triangle([f, constant(2)], [1, 2], triples=[(f, constant(2), f)]).passed


def test_symmetry_and_monotone():
    fam = mapping_family()
    pairs = [(constant(0), PiecewiseLinearMap((0, 4), (0, 2))), (constant(1), constant(1))]
    assert audit_symmetry(fam, pairs, [1, 2, 5]).passed
    assert audit_monotone_in_r(fam, pairs, [1, 2, 5]).passed


def test_suite_has_no_vacuous_only_reports():
    sample = [PiecewiseLinearMap((-1, 0, 2), (F(k, 9), F(k, 5), F(-k, 7))) for k in range(8)]
    for rep in axiom_suite(mapping_family(), sample, n_triples=60, seed=3):
        assert rep.passed and not rep.uninformative


def test_range_on():
    f = PiecewiseLinearMap((-1, 0, 1), (0, 2, -1))
    assert range_on(f, -1, 1) == (-1, 2)
    assert range_on(f, F(1, 2), 5) == (-1, F(1, 2))
    with pytest.raises(ValueError):
        range_on(f, 1, 0)


def test_canonical_equality():
    assert PiecewiseLinearMap((0, 1, 2), (0, 1, 2)) == PiecewiseLinearMap((0, 2), (0, 2))
    assert PiecewiseLinearMap((-3, 5), (1, 1)) == constant(1)
    assert PiecewiseLinearMap((0, 1), (0, 1)) != PiecewiseLinearMap((0, 2), (0, 2))
    assert hash(PiecewiseLinearMap((-3, 5), (1, 1))) == hash(constant(1))


@given(pl_maps())
def test_canonical_preserves_values(f):
    c = PiecewiseLinearMap.from_points(f.canonical())
    assert c == f
    for x in list(f.xs) + [F(-6), F(6), F(1, 3)]:
        assert c(x) == f(x)


def test_compact_open_forward_examples():
    f = constant(0)
    rep = compact_open_witness_forward(f, (-1, 1), (-1, 1), [constant(F(1, 4)), f, constant(F(3, 4))])
    assert rep.details["eps"] == F(1, 2)
    assert rep.passed and rep.checked == 2 and rep.vacuous == 1
    bad = compact_open_witness_forward(constant(2), (-1, 1), (-1, 1), [f])
    assert bad.verdict == "skipped"


@given(st.lists(pl_maps(), max_size=8))
def test_compact_open_forward_property(sample):
    f = PiecewiseLinearMap((-1, 1), (0, F(1, 2)))
    assert compact_open_witness_forward(f, (-2, 1), (-1, 2), sample).passed


def test_compact_open_backward_examples():
    f = constant(0)
    rep = compact_open_witness_backward(f, 1, 1, [f, constant(F(1, 4)), constant(2)])
    assert rep.passed and rep.checked == 2 and rep.vacuous == 1


@given(st.lists(pl_maps(), max_size=8), st.sampled_from([F(1, 2), 1, 3]))
def test_compact_open_backward_property(sample, eps):
    f = PiecewiseLinearMap((-2, 0, 3), (1, -1, 2))
    near = [PiecewiseLinearMap(g.xs, tuple(f(x) + y / 40 for x, y in zip(g.xs, g.ys))) for g in sample]
    assert compact_open_witness_backward(f, 2, eps, sample + near).passed


def test_file_format_round_trip():
    text = "# f\n-1 0\n0 1/2\n3/2 -2\n"
    f = parse_pl(text)
    assert f.xs == (-1, 0, F(3, 2)) and f.ys == (0, F(1, 2), -2)
    assert parse_pl(format_pl(f)) == f
    for bad in ("", "1\n", "1 2\n0 3\n", "x 1\n"):
        with pytest.raises(ValueError):
            parse_pl(bad)
