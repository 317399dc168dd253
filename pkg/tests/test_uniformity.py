from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from drspace.mapping_space import PiecewiseLinearMap, constant, mapping_family
from drspace.tiling import tiling_family
from drspace.uniformity import (
    Relation,
    compose,
    entourage_matrix,
    half_step,
    invert,
    verify_half_step,
    verify_intersection_scale,
)


def relations(n):
    return st.lists(st.booleans(), min_size=n * n, max_size=n * n).map(lambda b: Relation(np.array(b).reshape(n, n)))


def test_entourage_example(ab):
    sample = [ab, ab + F(1, 10), ab + 2]
    U = entourage_matrix(tiling_family(), sample, 5, F(1, 2))
    assert U.contains_diagonal()
    assert U.matrix[0, 1] and U.matrix[0, 2]
    assert tiling_family()(ab, ab + 2, 5) == 0


def test_entourage_small_eps_is_identity(ab):
    sample = [ab + F(k, 10) for k in range(4)]
    assert entourage_matrix(tiling_family(), sample, 5, F(1, 20)) == Relation.identity(4)


@given(relations(4))
def test_identity_is_neutral(U):
    I = Relation.identity(4)
    assert compose(I, U) == U and compose(U, I) == U


def test_compose_chain_by_enumeration():
    U = Relation.from_pairs(3, [(0, 1), (1, 2)])
    assert compose(U, U).pairs() == [(0, 2)]
    V = Relation.from_pairs(3, [(0, 1), (1, 2), (0, 0), (1, 1), (2, 2)])
    expected = {(x, z) for x in range(3) for z in range(3) if any((x, y) in V.pairs() and (y, z) in V.pairs() for y in range(3))}
    assert set(compose(V, V).pairs()) == expected


def test_compose_orientation():
    U = Relation.from_pairs(3, [(0, 1)])
    V = Relation.from_pairs(3, [(1, 2)])
    assert compose(U, V).pairs() == [(0, 2)]
    assert compose(V, U).pairs() == []


@given(relations(4), relations(4), relations(4))
def test_compose_associative(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(relations(3))
def test_invert_involution(U):
    assert invert(invert(U)) == U
    assert invert(Relation.identity(3)) == Relation.identity(3)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(Relation.identity(2), Relation.identity(3))
    with pytest.raises(ValueError):
        Relation(np.zeros((2, 3), dtype=bool))


def test_half_step_values():
    assert half_step(1, F(1, 2)) == (3, F(1, 4))
    assert half_step(1, 4) == (3, 1)
    assert half_step(2, 2) == (6, 1)
    with pytest.raises(ValueError):
        half_step(0, 1)


def test_verify_half_step_on_tilings(ab, fib):
    for T in (ab, fib):
        sample = [T + F(k, 10) for k in range(-4, 4)]
        assert verify_half_step(tiling_family(), sample, 1, F(1, 2)).passed
    assert verify_half_step(tiling_family(), [ab], 1, F(1, 2)).passed
    # V is the identity: V∘V = Δ ⊆ U
    assert verify_half_step(tiling_family(), [ab, ab + F(9, 10)], 1, F(1, 2)).passed


def test_intersection_scale(ab):
    sample = [ab + F(k, 7) for k in range(-3, 4)]
    fam = tiling_family()
    assert verify_intersection_scale(fam, sample, (1, F(1, 2)), (2, F(1, 4))).passed
    assert verify_intersection_scale(fam, sample, (1, F(1, 2)), (1, F(1, 2))).passed
    assert verify_intersection_scale(fam, [ab], (1, F(1, 2)), (2, F(1, 4))).passed


@given(st.sampled_from([F(1, 10), F(1, 3), 1]), st.sampled_from([F(1, 5), F(1, 2)]), st.sampled_from([1, 3]))
def test_entourage_monotone(eps, deps, r):
    fam = mapping_family()
    sample = [constant(F(k, 7)) for k in range(5)] + [PiecewiseLinearMap((0, 2), (0, 1))]
    assert entourage_matrix(fam, sample, r, eps).issubset(entourage_matrix(fam, sample, r, eps + deps))
    assert entourage_matrix(fam, sample, r + 2, eps).issubset(entourage_matrix(fam, sample, r, eps))


def test_symmetric_family_entourage_is_symmetric():
    sample = [constant(F(k, 5)) for k in range(5)] + [PiecewiseLinearMap((-1, 1), (0, 1))]
    U = entourage_matrix(mapping_family(), sample, 2, F(3, 10))
    assert invert(U) == U


def test_dump_round_trip():
    U = Relation.from_pairs(3, [(0, 0), (0, 2), (2, 1)])
    text = U.dump()
    assert text.splitlines()[0] == "n 3"
    assert Relation.load(text) == U
    with pytest.raises(ValueError):
        Relation.load("0 1\n")
