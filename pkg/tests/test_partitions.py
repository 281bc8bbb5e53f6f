from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from orbitforge import caps
from orbitforge.caps import OracleRangeExceeded
from orbitforge.partitions import (
    bell, check_lower_bound, check_upper_bound_termwise, find_upper_c, lower_bound_onset,
    p_k, p_k_bruteforce, p_k_table, restricted_growth_strings, s_k, s_k_closed, stirling2,
    termwise_onset, verify_upper_c,
)


def stirling_inclusion_exclusion(n, j):
    # j! S(n, j) = sum_i (-1)^i C(j, i) (j - i)^n
    return sum((-1) ** i * comb(j, i) * (j - i) ** n for i in range(j + 1)) // factorial(j)


def test_bell_examples():
    assert [bell(0), bell(3), bell(5)] == [1, 5, 52]


def test_bell_matches_enumeration():
    for n in range(9):
        assert bell(n) == sum(1 for _ in restricted_growth_strings(n))


def test_stirling_examples():
    assert stirling2(0, 0) == 1
    assert stirling2(4, 2) == 7
    assert stirling2(3, 4) == 0


@given(st.integers(0, 30), st.integers(0, 30))
def test_stirling_matches_inclusion_exclusion(n, j):
    expected = 0 if j > n else stirling_inclusion_exclusion(n, j)
    assert stirling2(n, j) == expected


@given(st.integers(0, 40))
def test_stirling_row_sums_to_bell(n):
    assert sum(stirling2(n, j) for j in range(n + 1)) == bell(n)


def test_p_k_examples():
    assert p_k(1, 7) == 1
    assert p_k(2, 5) == 26
    assert p_k(3, 5) == 46
    assert p_k(2, 5) == p_k(2, 4) + 4 * p_k(2, 3)


def test_bruteforce_examples():
    assert p_k_bruteforce(4, 3) == 5
    assert p_k_bruteforce(2, 4) == 10
    assert p_k_bruteforce(3, 4) == 14


def test_bruteforce_refuses_past_cap():
    with pytest.raises(OracleRangeExceeded, match="oracle range exceeded"):
        p_k_bruteforce(2, 14)
    with caps.override(oracle_cap=5):
        with pytest.raises(OracleRangeExceeded):
            p_k_bruteforce(2, 6)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
def test_p_k_matches_bruteforce(k):
    for n in range(11):
        assert p_k(k, n) == p_k_bruteforce(k, n)


@given(st.integers(1, 12), st.integers(0, 60))
def test_p_k_table_properties(k, n):
    assert p_k(1, n) == 1
    assert p_k(k, n) <= p_k(k + 1, n) <= bell(n)
    if k >= n:
        assert p_k(k, n) == bell(n)
    table = p_k_table(k, n)
    assert table[0] == 1
    if k >= 2:
        assert all(a <= b for a, b in zip(table, table[1:]))


def test_s_k_examples():
    assert s_k(5, 1) == 1
    assert s_k(2, 2) == 3
    assert s_k(3, 2) == 10


@given(st.integers(1, 8), st.integers(0, 12))
def test_s_k_recursion_matches_closed_form(k, n):
    assert s_k(k, n) == s_k_closed(k, n)


def test_s_k_counts_perfect_block_partitions():
    for k in (2, 3):
        for n in range(4):
            count = 0
            for rgs in restricted_growth_strings(k * n):
                sizes = [rgs.count(b) for b in set(rgs)]
                count += all(x == k for x in sizes)
            assert count == s_k(k, n)


def test_lower_bound_examples():
    assert check_lower_bound(1, Fraction(1, 10), 100)
    assert check_lower_bound(2, Fraction(1, 4), 64)
    # p_2(2) = 2 against 2^(1/2): 2^4 = 16 >= 2^2 = 4
    assert check_lower_bound(2, Fraction(1, 4), 2)


def test_lower_bound_is_exact_at_the_boundary():
    # q = 1/2: p_2(n)^2 >= n^n; p_2(3) = 4 gives 16 < 27, p_2(2) = 2 gives 4 >= 4
    assert check_lower_bound(2, 0, 2)
    assert not check_lower_bound(2, 0, 3)


def test_upper_bound_termwise_examples():
    assert check_upper_bound_termwise(1, Fraction(1, 2), 5)
    # n = 4: i=0 compares 2^4 = 16 < 4^3 = 64, i=1 compares 6^4 = 1296 < 12^3 = 1728
    assert check_upper_bound_termwise(2, Fraction(3, 4), 4)
    assert check_upper_bound_termwise(2, Fraction(3, 4), 1000)
    with pytest.raises(ValueError):
        check_upper_bound_termwise(2, Fraction(1), 5)


@settings(max_examples=60)
@given(st.integers(1, 4), st.integers(1, 9), st.integers(1, 80))
def test_upper_bound_termwise_monotone_in_d(k, a, n):
    lo = Fraction(a, 10)
    hi = Fraction(a + 1, 10)
    if hi < 1 and check_upper_bound_termwise(k, lo, n):
        assert check_upper_bound_termwise(k, hi, n)


def test_find_upper_c_examples():
    c1 = find_upper_c(1, Fraction(1, 2), 10).c
    assert c1 > 1 and verify_upper_c(1, Fraction(1, 2), 2, 10)
    for k, d, n_max in [(2, Fraction(3, 4), 50), (3, Fraction(9, 10), 30)]:
        found = find_upper_c(k, d, n_max)
        assert found.c >= 1
        assert verify_upper_c(k, d, found.c, n_max)


@pytest.mark.parametrize("k,d", [(2, Fraction(3, 4)), (3, Fraction(5, 6))])
def test_find_upper_c_is_minimal_for_its_denominators(k, d):
    found = find_upper_c(k, d, 40, max_denominator=8)
    assert verify_upper_c(k, d, found.c, 40)
    for q in range(1, 9):
        below = Fraction((found.c * q).__ceil__() - 1, q)
        assert not verify_upper_c(k, d, below, 40)


def test_onsets_are_consistent_with_checks():
    onset = lower_bound_onset(3, Fraction(1, 6), 128)
    assert onset is not None
    assert all(check_lower_bound(3, Fraction(1, 6), n) for n in range(onset, 129))
    assert onset == 1 or not check_lower_bound(3, Fraction(1, 6), onset - 1)
    t = termwise_onset(2, Fraction(3, 4), 200)
    assert all(check_upper_bound_termwise(2, Fraction(3, 4), n) for n in range(t + 1, 201))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_lower_bound_monotone_onset_below_512(k):
    eps = Fraction(1, 4 * k)
    onset = lower_bound_onset(k, eps, 512)
    assert onset is not None and onset <= 512, f"k={k}: bound fails at n=512"


def test_concurrent_table_fill_is_idempotent():
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(8) as pool:
        values = list(pool.map(lambda n: p_k(7, n), range(200, 0, -1)))
    assert values[::-1] == [p_k_bruteforce(7, n) if n <= 10 else p_k(7, n) for n in range(1, 201)]
