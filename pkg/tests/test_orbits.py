from math import perm as falling

import pytest
from hypothesis import given, settings, strategies as st

from orbitforge.caps import CapExceeded
from orbitforge.orbits import (
    OrbitCountSequence, count_injective_orbits, count_orbits, crosscheck, crosscheck_sizes,
    orbit_sequence, truncation_count,
)
from orbitforge.partitions import bell, p_k, stirling2
from orbitforge.reducts import enumerate_covering_reducts, enumerate_unary_reducts
from orbitforge.structures import (
    INF, UnaryStructure, nabla_class_count, truncate,
)

from matrix import FLIP, cover, extended_matrix, one_orbit_reduct, swap_reduct, unary


def test_count_examples():
    assert count_injective_orbits(unary(INF), 5) == 1
    assert count_injective_orbits(unary(INF, INF), 2) == 4
    assert count_injective_orbits(swap_reduct(), 3) == 4
    assert count_injective_orbits(cover([INF], ["ab"]), 2) == 6
    assert count_orbits(unary(INF), 3) == 5
    assert count_orbits(cover([INF], ["ab"]), 2) == 8


def test_finite_orbits_cap_injective_tuples():
    assert count_injective_orbits(unary(INF, 1), 2) == 3
    assert count_injective_orbits(unary(1, 1), 3) == 0
    assert count_injective_orbits(unary(2), 2) == 1


def test_orbit_n_cap():
    with pytest.raises(CapExceeded, match="orbit n cap"):
        count_injective_orbits(unary(INF), 20)
    assert count_injective_orbits(unary(INF), 20, n_cap=20) == 1
    with pytest.raises(ValueError):
        count_injective_orbits(unary(INF), 0)


def _unary_oracle(sizes, n):
    """Injective orbits of a unary structure: choose an orbit per position,
    respecting finite sizes; tuples are then determined up to the group."""
    from itertools import product
    from collections import Counter
    total = 0
    for choice in product(range(len(sizes)), repeat=n):
        used = Counter(choice)
        if all(sizes[i] == INF or used[i] <= sizes[i] for i in used):
            # finite orbits carry the full symmetric group, so one orbit per choice
            total += 1
    return total


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([INF, 1, 2, 3]), min_size=1, max_size=4), st.integers(1, 5))
def test_unary_counts_match_orbit_choice_oracle(sizes, n):
    assert count_injective_orbits(UnaryStructure.from_sizes(sizes), n) == _unary_oracle(sizes, n)


def test_swap_sequence_is_powers_of_two():
    assert orbit_sequence(swap_reduct(), 7).counts == [2 ** (n - 1) for n in range(1, 8)]


def test_wreath_matches_p2():
    wreath = one_orbit_reduct([FLIP], [FLIP])
    assert orbit_sequence(wreath, 8).counts == [p_k(2, n) for n in range(1, 9)]


def test_small_cover_sequences():
    assert orbit_sequence(cover([INF], ["ab"]), 5).counts == [2, 6, 20, 76, 312]
    assert orbit_sequence(one_orbit_reduct([FLIP], []), 5).counts == [1, 3, 10, 38, 156]


@pytest.mark.parametrize("name", list(extended_matrix()))
def test_symbolic_counts_match_truncations(name):
    s = extended_matrix()[name]
    for n in range(1, 5):
        report = crosscheck(s, n)
        assert report.stabilized, report.to_dict()
        assert report.agrees, report.to_dict()


@pytest.mark.parametrize("name", list(extended_matrix()))
def test_all_tuple_counts_match_truncations(name):
    s = extended_matrix()[name]
    for n in range(1, 4):
        sizes = crosscheck_sizes(s, n + 1)
        assert count_orbits(s, n) == truncation_count(s, n, sizes, kind="all")


BASES = [([INF], ["ab"]), ([INF], ["abc"]), ([INF, INF], ["ab", "xy"]), ([INF, 1], ["ab", "xy"]),
         ([1, 1], ["ab", "x"]), ([INF, INF], ["a", "xyz"])]


@pytest.mark.parametrize("base,fibers", BASES)
def test_every_covering_reduct_counts_like_its_truncation(base, fibers):
    for r in enumerate_covering_reducts(cover(base, fibers)):
        for n in (1, 2, 3):
            report = crosscheck(r, n)
            assert report.ok and report.agrees, report.to_dict()


@pytest.mark.parametrize("sizes", [[INF, INF], [INF, 1], [INF, INF, 1], [INF, 2]])
def test_every_unary_reduct_counts_like_its_truncation(sizes):
    for r in enumerate_unary_reducts(UnaryStructure.from_sizes(sizes)):
        for n in (1, 2, 3):
            report = crosscheck(r, n)
            assert report.ok and report.agrees, report.to_dict()


@pytest.mark.parametrize("name", list(extended_matrix()))
def test_burnside_sum_is_divisible(name):
    # orbits on injective tuples of a truncation, averaged over the group
    s = extended_matrix()[name]
    g = truncate(s, crosscheck_sizes(s, 3)).group
    elems = g.elements()
    for n in (1, 2, 3):
        total = sum(falling(sum(1 for i, x in enumerate(e) if i == x), n) for e in elems)
        assert total % len(elems) == 0
        assert total // len(elems) == count_injective_orbits(s, n)


@pytest.mark.parametrize("sizes", [[INF, INF], [INF, 1], [INF, INF, 1]])
def test_reducts_have_fewer_orbits(sizes):
    u = UnaryStructure.from_sizes(sizes)
    for r in enumerate_unary_reducts(u):
        for n in range(1, 6):
            assert count_injective_orbits(r, n) <= count_injective_orbits(u, n)


@pytest.mark.parametrize("base,fibers", BASES)
def test_covering_reducts_have_fewer_orbits(base, fibers):
    c = cover(base, fibers)
    for r in enumerate_covering_reducts(c):
        for n in range(1, 6):
            assert count_injective_orbits(r, n) <= count_injective_orbits(c, n)


ONE_ORBIT = {f"fibers {f} reduct {i}": r
             for f in ("ab", "abc") for i, r in enumerate(enumerate_covering_reducts(cover([INF], [f])))}


@pytest.mark.parametrize("fibers", ["ab", "abc"])
def test_growth_bound_with_nabla_class_count(fibers):
    # o_n <= (#nabla classes)^n p_k(n), with k the fiber size
    violations = []
    for i, r in enumerate(enumerate_covering_reducts(cover([INF], [fibers]))):
        k = len(fibers)
        m = nabla_class_count(r)
        for n in range(1, 7):
            if count_injective_orbits(r, n) > m ** n * p_k(k, n):
                violations.append((i, n))
                break
    assert violations == [], f"(reduct, first failing n): {violations}"


@pytest.mark.parametrize("name", list(ONE_ORBIT))
def test_growth_bound_with_cover_orbit_count(name):
    # the same bound, counting the orbits of the underlying cover
    r = ONE_ORBIT[name]
    k = len(r.cover.fibers[0])
    m = sum(r.cover.fiber_sizes)
    for n in range(1, 7):
        assert count_injective_orbits(r, n) <= m ** n * p_k(k, n)


@pytest.mark.parametrize("sizes", [[INF], [INF, INF], [INF, 1], [INF, INF, INF]])
def test_unary_reducts_grow_at_most_exponentially(sizes):
    for r in enumerate_unary_reducts(UnaryStructure.from_sizes(sizes)):
        m = nabla_class_count(r)
        assert all(count_injective_orbits(r, n) <= m ** n for n in range(1, 7))


def test_count_orbits_is_a_stirling_sum():
    c = cover([INF], ["ab"])
    for n in range(1, 6):
        expected = sum(stirling2(n, j) * count_injective_orbits(c, j) for j in range(1, n + 1))
        assert count_orbits(c, n) == expected
    assert [count_orbits(unary(INF), n) for n in range(1, 7)] == [bell(n) for n in range(1, 7)]


def test_sequence_round_trips():
    seq = orbit_sequence(one_orbit_reduct([FLIP], [FLIP]), 6)
    assert OrbitCountSequence.from_csv(seq.to_csv()) == seq
    assert seq.to_csv().splitlines()[0] == "n,count"
    import json
    data = json.loads(seq.to_json())
    assert [e["count"] for e in data["entries"]] == seq.counts
    assert seq.to_table().splitlines()[1].split() == ["1", "1"]


def test_sequence_rejects_bad_input():
    with pytest.raises(ValueError):
        OrbitCountSequence(((2, 1), (1, 1)))
    with pytest.raises(ValueError):
        OrbitCountSequence.from_csv("a,b\n1,2\n")
    with pytest.raises(ValueError):
        orbit_sequence(unary(INF), 3, kind="subsets")


def test_crosscheck_report_fields():
    report = crosscheck(cover([INF], ["ab"]), 2)
    d = report.to_dict()
    assert d["symbolic"] == d["truncated"] == d["truncated_larger"] == 6
    assert d["sizes"] == {"O1": 4} and d["larger_sizes"] == {"O1": 5}
    with pytest.raises(ValueError):
        crosscheck(unary(INF), 2, margin=0)
