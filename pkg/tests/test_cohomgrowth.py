from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _oracles import cubic_root_count, euler_legendre, naive_is_prime, reduced_two_torsion
from isodescent.cohomgrowth import (
    GeneralCurve,
    TamagawaFactor,
    cor_prime_search,
    g_lower_bound,
    local_h1_order,
    reduction_two_torsion,
    split_prime_search,
    tamagawa_factor,
    tamagawa_factors,
    tamagawa_h,
    tamagawa_lower_bound,
)
from isodescent.errors import InvalidInput, SearchExhausted
from isodescent.localfield import REAL

ODD_PRIMES = [q for q in range(3, 120) if naive_is_prime(q)]


@pytest.mark.parametrize("a2, a4", [(0, 17), (0, 1), (0, -1), (3, 2), (1, 5), (-2, 7)])
def test_reduction_two_torsion_matches_root_count(a2, a4):
    c = GeneralCurve(a2, a4)
    for q in ODD_PRIMES:
        if c.has_good_reduction(q):
            assert reduction_two_torsion(c, q) == reduced_two_torsion(a2, a4, q)


def test_reduction_rejects_bad_primes():
    with pytest.raises(InvalidInput):
        reduction_two_torsion(17, 17)
    with pytest.raises(InvalidInput):
        reduction_two_torsion(17, 2)


def test_singular_curve_rejected():
    with pytest.raises(InvalidInput):
        GeneralCurve(2, 1)
    with pytest.raises(InvalidInput):
        GeneralCurve(3, 0)


def test_local_h1_orders():
    D = -11 * 13 * 29
    assert local_h1_order(17, 11, D) == reduced_two_torsion(0, 17, 11)
    assert local_h1_order(17, 3, D) == 1  # unramified
    assert local_h1_order(17, 17, D) is None  # bad
    assert local_h1_order(17, 2, D) is None
    assert local_h1_order(17, REAL, 5) == 1


def test_growth_report_fixture():
    D = -11 * 13 * 29
    g = g_lower_bound(17, D, 0, 0)
    brute = [reduced_two_torsion(0, 17, q) for q in (11, 13, 29)]
    assert [k for _, k in g.ramified_good_factors] == brute
    assert g.numerator == brute[0] * brute[1] * brute[2] == 32
    assert g.g_lower == Fraction(g.numerator, 2)
    assert g.sha_growth_lower == Fraction(16, 8)
    assert g.conditional_on == ["rank_twist", "rank_base"]


def test_growth_omits_bad_and_wild_primes():
    g = g_lower_bound(17, -2 * 17 * 13, 1)
    assert g.omitted_places == (2, 17)
    assert [q for q, _ in g.ramified_good_factors] == [13]
    assert g.rank_base is None and "rank_base_defaulted_to_0" in g.conditional_on
    assert g.denominator_bound == 4


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from([3, 5, 7, 11, 13, 19, 23]), min_size=1, max_size=4, unique=True), st.booleans())
def test_numerator_is_multiplicative(primes, negative):
    D = 1
    for q in primes:
        D *= q
    D = -D if negative else D
    g = g_lower_bound(17, D, 0)
    expect = 1
    for q in primes:
        expect *= g_lower_bound(17, q, 0).numerator
    assert g.numerator == expect


def test_growth_input_validation():
    with pytest.raises(InvalidInput):
        g_lower_bound(17, 12, 0)
    with pytest.raises(InvalidInput):
        g_lower_bound(17, -11, -1)


def test_split_primes():
    got = split_prime_search(17, 5)
    assert got == [q for q in ODD_PRIMES if q != 17 and euler_legendre(-17, q) == 1][:5]
    assert all(reduced_two_torsion(0, 17, q) == 4 for q in got)
    assert split_prime_search(1, 3) == [5, 13, 17]


def test_split_primes_strict_mode():
    # principal form x^2 + 17 y^2 must represent q
    got = split_prime_search(17, 3, strict_hcf=True)
    assert got == [53, 149, 157]
    for q in got:
        assert any((q - 17 * y * y) >= 0 and int((q - 17 * y * y) ** 0.5) ** 2 == q - 17 * y * y for y in range(0, 4))
    with pytest.raises(InvalidInput):
        split_prime_search(-2, 1, strict_hcf=True)


def test_split_prime_exhaustion():
    with pytest.raises(SearchExhausted):
        split_prime_search(17, 5, bound=20)


def _dim(count: int) -> int:
    return (1 + count).bit_length() - 1


@pytest.mark.parametrize("a2, a4", [(0, 1), (0, 4), (1, 3), (2, -3)])
def test_tamagawa_dims_match_root_counts(a2, a4):
    c = GeneralCurve(a2, a4)
    for q in ODD_PRIMES:
        if not c.has_good_reduction(q):
            continue
        tf = tamagawa_factor(c, q)
        dim_e = _dim(cubic_root_count(a2, a4, q))
        dim_dual = _dim(cubic_root_count(-2 * a2, a2 * a2 - 4 * a4, q))
        assert tf.dims == (dim_e, dim_dual)


def test_case_table():
    assert TamagawaFactor(3, (1, 2)).quotient == 4
    assert TamagawaFactor(3, (2, 1)).quotient == 1
    assert TamagawaFactor(3, (1, 1)).quotient == 2
    assert TamagawaFactor(3, (2, 2)).factor == 1


def test_cor_search_and_h():
    found = cor_prime_search((0, 1), 3)
    assert [tf.prime for tf in found] == [3, 7, 11]
    assert all(tf.quotient == 4 for tf in found)
    assert [tf.prime for tf in cor_prime_search((0, 4), 2)] == [3, 7]
    D = 3 * 7 * 11
    assert [tf.factor for tf in tamagawa_factors((0, 1), D)] == [2, 2, 2]
    assert tamagawa_h((0, 1), D) == 8
    assert tamagawa_lower_bound((0, 1), D, 0) == 2


def test_cor_gate():
    # b (a^2 - 4b) a square: the two 2-division fields coincide
    with pytest.raises(InvalidInput):
        cor_prime_search((5, 4), 1)
