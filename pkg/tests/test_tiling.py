import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from drspace.tiling import (
    ORBIT_CAP,
    GeneratorExhausted,
    _orbit_feasible,
    ball_to_nbhd_witness,
    dr_tiling,
    format_tiling,
    lambda_T,
    nbhd_to_ball_witness,
    orbit_metric,
    parse_tiling,
    patch,
    patches_equal,
    periodic_tiling,
    substitution_tiling,
    translate,
    uniqueness_check,
    valid_translations,
)

import oracles
from conftest import FIB_RULES, UNIT

small = st.fractions(min_value=-3, max_value=3, max_denominator=40)


def periodic_tiles(word, lengths, offset):
    return lambda lo, hi: oracles.explicit_periodic(word, lengths, offset, lo, hi)


def fib_tiles(offset):
    return lambda lo, hi: oracles.explicit_substitution(FIB_RULES, ("a", "a"), UNIT, offset, lo, hi)


def test_patch_of_ab_at_r1_has_four_tiles(ab):
    p = patch(ab, 1)
    assert [(a, b) for a, b, _ in p.tiles] == [(-2, -1), (-1, 0), (0, 1), (1, 2)]
    assert "".join(c for *_, c in p.tiles) == "abab"


@pytest.mark.parametrize("r", [F(1, 2), 1, F(7, 3), 6])
@pytest.mark.parametrize("x", [0, F(3, 10), F(-17, 7), 5])
def test_patch_matches_explicit_enumeration(r, x):
    T = periodic_tiling("aab", {"a": 1, "b": F(3, 2)}, x)
    expected = sorted(oracles.window(oracles.explicit_periodic("aab", {"a": 1, "b": F(3, 2)}, F(x), -r - 3, r + 3), -r, r))
    assert list(patch(T, r).tiles) == expected


@pytest.mark.parametrize("offset", [0, F(1, 3), F(-5, 2)])
def test_substitution_patch_matches_explicit_fixed_point(offset):
    T = substitution_tiling(FIB_RULES, "a|a", UNIT, offset)
    r = 40
    expected = sorted(oracles.window(fib_tiles(F(offset))(-r - 2, r + 2), -r, r))
    assert list(patch(T, r).tiles) == expected


def test_patch_for_tiny_radius(ab):
    assert len(patch(ab + F(1, 2), F(1, 10))) == 1
    assert len(patch(ab, F(1, 10))) == 2


@given(small, small)
def test_translate_composes(x, y):
    T = periodic_tiling("abb", UNIT)
    assert translate(translate(T, x), y) == translate(T, x + y)


def test_translate_by_period_gives_same_patches(ab):
    for r in (1, 5, 20):
        assert patch(translate(ab, 2), r) == patch(ab, r)
    assert translate(ab, 0) == ab


def test_valid_translations_examples(ab):
    assert valid_translations(ab, ab + F(3, 10), 5, 3) == [F(3, 10), F(-17, 10), F(23, 10)]
    same = valid_translations(ab, ab, 5, 6)
    assert same == [0, -2, 2, -4, 4, -6, 6]
    other = periodic_tiling("c", {"c": 1})
    assert valid_translations(ab, other, 5, 3) == []


def test_dr_examples(ab, aaa, fib):
    assert dr_tiling(ab, ab, 5) == 0
    assert dr_tiling(ab, ab + F(3, 10), 5) == F(3, 10)
    assert dr_tiling(aaa, aaa + F(7, 10), 5) == F(3, 10)
    assert dr_tiling(fib, fib + F(1, 5), 20) == F(1, 5)
    assert dr_tiling(ab, periodic_tiling("c", {"c": 1}), 5) == math.inf


@pytest.mark.parametrize("r", [1, F(5, 2), 5])
@pytest.mark.parametrize("x", [F(3, 10), F(-7, 4), F(13, 10), F(1, 7)])
def test_dr_matches_brute_force_periodic(r, x):
    lengths = {"a": 1, "b": F(3, 2)}
    T1 = periodic_tiling("aab", lengths)
    T2 = periodic_tiling("aab", lengths, x)
    rho = 4
    tiles = {1: periodic_tiles("aab", lengths, F(0)), 2: periodic_tiles("aab", lengths, x)}
    assert dr_tiling(T1, T2, r, rho) == oracles.translation_distance(lambda k, lo, hi: tiles[k](lo, hi), r, rho)


@pytest.mark.parametrize("r", [1, 4, 9])
@pytest.mark.parametrize("x", [F(1, 5), F(-13, 10), F(3), F(21, 8)])
def test_dr_matches_brute_force_fibonacci(r, x):
    T1 = substitution_tiling(FIB_RULES, "a|a", UNIT)
    T2 = substitution_tiling(FIB_RULES, "a|a", UNIT, x)
    rho = 5
    tiles = {1: fib_tiles(F(0)), 2: fib_tiles(x)}
    assert dr_tiling(T1, T2, r, rho) == oracles.translation_distance(lambda k, lo, hi: tiles[k](lo, hi), r, rho)


@given(small, st.sampled_from([1, 2, 5]), st.sampled_from([1, 3, 8]))
def test_dr_monotone_in_r(x, r1, dr):
    T = substitution_tiling(FIB_RULES, "a|a", UNIT)
    assert dr_tiling(T, T + x, r1) <= dr_tiling(T, T + x, r1 + dr)


@given(st.fractions(min_value=F(-49, 100), max_value=F(49, 100)), st.sampled_from([1, 5, 20, 3**8]))
def test_translation_identity_below_lambda(x, r):
    T = substitution_tiling(FIB_RULES, "a|a", UNIT)
    assert dr_tiling(T, T + x, r) == abs(x)


def test_large_scale_evaluation_is_supported(fib):
    assert dr_tiling(fib, fib + F(1, 100), 3**16) == F(1, 100)


def test_lambda_examples():
    assert lambda_T({"a": 1}) == F(1, 2)
    assert lambda_T({"a": 1, "b": F(3, 2)}) == F(1, 2)
    assert lambda_T({"a": 2}) == 1


def test_orbit_metric_examples(ab):
    assert orbit_metric(ab, ab) == 0
    assert orbit_metric(ab, periodic_tiling("c", {"c": 1})) == pytest.approx(ORBIT_CAP)
    for x in (F(1, 10), F(1, 5), F(3, 10)):
        assert abs(orbit_metric(ab, ab + x) - float(x) / 2) < 1e-8
        assert orbit_metric(ab, ab + x) <= ORBIT_CAP


@pytest.mark.parametrize("x", [F(1, 10), F(3, 10), F(-1, 5)])
def test_orbit_feasibility_agrees_with_grid_search(ab, x):
    tiles_a = oracles.explicit_periodic("ab", UNIT, F(0), -30, 30)
    tiles_b = oracles.explicit_periodic("ab", UNIT, x, -30, 30)
    step = F(1, 200)
    for eps in (abs(x) / 2 - F(1, 50), abs(x) / 2 + F(1, 50), F(1, 2)):
        assert _orbit_feasible(ab, ab + x, eps) == oracles.orbit_feasible_grid(tiles_a, tiles_b, eps, step)


def test_orbit_metric_beats_one_sided_bound(ab):
    x = F(3, 10)
    assert orbit_metric(ab, ab + x) < float(x) - 0.1


def test_ball_to_nbhd_bound(ab):
    rep = ball_to_nbhd_witness(ab, 5, F(1, 2), [ab + F(k, 50) for k in range(-10, 11)])
    assert rep.details["bound"] == F(4, 25)
    assert rep.details["eps_prime"] < F(4, 25)
    assert rep.passed and rep.checked > 0


def test_ball_to_nbhd_empty_sample_is_uninformative(ab):
    rep = ball_to_nbhd_witness(ab, 5, F(1, 2), [])
    assert rep.passed and rep.uninformative


def test_nbhd_to_ball_constants(ab):
    rep = nbhd_to_ball_witness(ab, F(1, 2), [ab, ab + F(1, 10), ab + F(-1, 7)])
    assert rep.details["r_prime"] == 3 and rep.details["eps_prime"] == F(1, 4)
    assert rep.passed and rep.checked == 3


def test_uniqueness_check_examples(ab):
    assert uniqueness_check(ab, (-3, 3), F(1, 10), F(1, 10))
    assert uniqueness_check(ab, (-3, 3), F(1, 10), F(-1, 10))
    assert not patches_equal(ab + F(1, 10), ab + F(-1, 10), -3, 3)


@given(st.fractions(min_value=F(-49, 100), max_value=F(49, 100)), st.fractions(min_value=F(-49, 100), max_value=F(49, 100)))
def test_uniqueness_randomized(u, v):
    T = substitution_tiling(FIB_RULES, "a|a", UNIT)
    assert uniqueness_check(T, (-2, 2), u, v)


def test_file_round_trip(fib):
    text = "# fib\na 1\nb 1\nsubstitution a->ab b->a seed a|a\noffset 3/10\n"
    T = parse_tiling(text)
    assert T == fib + F(3, 10)
    assert parse_tiling(format_tiling(T)) == T


@pytest.mark.parametrize(
    "text",
    ["a 1\n", "a 1\nperiodic ab\n", "a 0\nperiodic a\n", "a 1\nsubstitution a->aa seed a\n", "a 1\nwhat is this\n"],
)
def test_malformed_files_raise(text):
    with pytest.raises(ValueError):
        parse_tiling(text)


def test_incompatible_lengths_rejected(ab):
    other = periodic_tiling("ab", {"a": 1, "b": 2})
    with pytest.raises(ValueError):
        dr_tiling(ab, other, 1)


def test_illegal_seed_is_hard_error():
    with pytest.raises((ValueError, GeneratorExhausted)):
        substitution_tiling(FIB_RULES, "b|b", UNIT)


def test_dr_is_not_symmetric_in_general(fib):
    # frozen from the brute-force oracle: the windows differ once |u| exceeds lambda_T
    x, y = fib + F(-117, 40), fib + F(-613, 500)
    assert dr_tiling(x, y, 2) == F(1699, 1000)
    assert dr_tiling(y, x, 2) == F(1301, 1000)


@given(st.fractions(min_value=F(-49, 100), max_value=F(49, 100)), st.fractions(min_value=F(-49, 100), max_value=F(49, 100)))
def test_dr_symmetric_for_short_translates(s, t):
    T = substitution_tiling(FIB_RULES, "a|a", UNIT)
    if abs(s - t) < F(1, 2):
        assert dr_tiling(T + s, T + t, 3) == dr_tiling(T + t, T + s, 3)
