import itertools

import pytest
from hypothesis import given, settings, strategies as st

from orbitforge import caps
from orbitforge import permgroup as pg
from orbitforge.caps import CapExceeded, InvalidStructure
from orbitforge.orbits import crosscheck_sizes
from orbitforge.reducts import (
    count_covering_reducts, count_unary_reducts, covering_contains, distinguishing_assignment,
    enumerate_covering_reducts, enumerate_unary_reducts, kernel_membership, reduct_contains,
    reducts_of, _star_form,
)
from orbitforge.structures import (
    INF, ClassPartition, ReductOfUnary, UnaryStructure, truncate, validate,
)

from matrix import FLIP, cover, one_orbit_reduct, swap_reduct, unary


@pytest.mark.parametrize("sizes,count", [
    ([INF], 1), ([INF, 1], 2), ([INF, INF], 3), ([INF, INF, INF], 13), ([1], 1),
    ([INF, INF, 1], 8), ([2], 1), ([INF, 2], 2), ([INF, 3], 2),
])
def test_unary_reduct_counts(sizes, count):
    assert count_unary_reducts(UnaryStructure.from_sizes(sizes)) == count


def test_two_infinite_orbits_match_the_truncation_lattice():
    # groups between Sym(3) x Sym(3) and Sym(6): the product, the wreath, Sym(6)
    s3s3 = pg.direct_product([pg.symmetric_group(3), pg.symmetric_group(3)])
    assert len(pg.subgroups_above(s3s3, pg.symmetric_group(6))) == 3
    assert count_unary_reducts(unary(INF, INF)) == 3


def test_reducts_of_a_reduct_are_above_it():
    found = enumerate_unary_reducts(swap_reduct())
    # the swap reduct itself, and the one-class reduct
    assert len(found) == 2
    assert all(reduct_contains(r, swap_reduct()) for r in found)


def test_reduct_orbit_cap():
    with pytest.raises(CapExceeded, match="reduct orbit cap"):
        count_unary_reducts(unary(*[INF] * 4), orbit_cap=3)


UNARY_BASES = [[INF], [INF, 1], [INF, INF], [INF, INF, 1], [INF, 2], [INF, 3], [1, 1, INF]]


@pytest.mark.parametrize("sizes", UNARY_BASES)
def test_every_unary_reduct_validates_and_contains_the_base(sizes):
    u = UnaryStructure.from_sizes(sizes)
    star = _star_form(u)
    for r in enumerate_unary_reducts(u):
        assert validate(r) == []
        t_r = truncate(r, crosscheck_sizes(r, 2))
        t_u = truncate(star, crosscheck_sizes(r, 2))
        assert t_r.point_labels == t_u.point_labels
        assert all(g in t_r.group for g in t_u.group.generators)


@pytest.mark.parametrize("sizes", UNARY_BASES)
def test_unary_reducts_are_pairwise_distinct(sizes):
    found = list(enumerate_unary_reducts(UnaryStructure.from_sizes(sizes)))
    groups = []
    for r in found:
        groups.append(truncate(r, crosscheck_sizes(r, 2)).group.element_set())
    assert len(set(groups)) == len(found)


def _coordinate_subgroup_oracle(f):
    """Two-fiber kernels of one-orbit covering reducts with fiber size f.

    These are the subgroups K of Sym(f) x Sym(f) whose two projections agree
    and which contain the diagonal copy of that projection.
    """
    count = 0
    for k in pg.all_subgroups(pg.direct_product([pg.symmetric_group(f)] * 2)):
        elems = k.element_set()
        left = {e[:f] for e in elems}
        right = {tuple(x - f for x in e[f:]) for e in elems}
        if left == right and all(h + tuple(x + f for x in h) in elems for h in left):
            count += 1
    return count


@pytest.mark.parametrize("f,count", [(1, 1), (2, 3), (3, 12)])
def test_one_orbit_counts(f, count):
    c = cover([INF], ["abcd"[:f]])
    assert count_covering_reducts(c) == count
    assert _coordinate_subgroup_oracle(f) == count


@pytest.mark.parametrize("f", [1, 2, 3, 4])
def test_one_orbit_counts_follow_normal_subgroup_sum(f):
    formula = sum(len(pg.normal_subgroups(h)) for h in pg.all_subgroups(pg.symmetric_group(f)))
    assert count_covering_reducts(cover([INF], ["abcd"[:f]])) == formula


@pytest.mark.parametrize("base,fibers,count", [
    ([INF, INF], ["ab", "xy"], 10),
    ([INF, 1], ["a", "x"], 1),
    ([1], ["ab"], 2),
    ([INF, 1], ["ab", "xy"], 7),
])
def test_covering_reduct_counts(base, fibers, count):
    assert count_covering_reducts(cover(base, fibers)) == count


COVERS = [([INF], ["ab"]), ([INF], ["abc"]), ([INF, INF], ["ab", "xy"]), ([INF, 1], ["ab", "xy"]),
          ([1, 1], ["ab", "x"])]


@pytest.mark.parametrize("base,fibers", COVERS)
def test_every_covering_reduct_validates_and_contains_the_cover(base, fibers):
    c = cover(base, fibers)
    for r in enumerate_covering_reducts(c):
        assert validate(r) == []
        assert covering_contains(r, c)
        sizes = {o.name: 2 if o.size == INF else o.size for o in c.base.orbits}
        t_r, t_c = truncate(r, sizes), truncate(c, sizes)
        assert t_r.point_labels == t_c.point_labels
        assert all(g in t_r.group for g in t_c.group.generators)


@pytest.mark.parametrize("base,fibers", COVERS)
def test_covering_reducts_are_pairwise_distinct(base, fibers):
    found = list(enumerate_covering_reducts(cover(base, fibers)))
    for r1, r2 in itertools.combinations(found, 2):
        a = distinguishing_assignment(r1, r2)
        assert a is not None
        assert kernel_membership(r1, a) != kernel_membership(r2, a)


def test_kernel_membership_examples():
    flip_one = {("O1", 0): (0, 1), ("O1", 1): FLIP}
    assert not kernel_membership(one_orbit_reduct([FLIP], []), flip_one)
    assert kernel_membership(one_orbit_reduct([FLIP], [FLIP]), flip_one)
    both = {("O1", 0): FLIP, ("O1", 1): FLIP}
    assert kernel_membership(one_orbit_reduct([FLIP], []), both)
    assert not kernel_membership(one_orbit_reduct([], []), both)


def test_kernel_membership_errors():
    r = one_orbit_reduct([FLIP], [FLIP])
    with pytest.raises(ValueError, match="unknown fiber"):
        kernel_membership(r, {("X", 0): FLIP})
    two = enumerate_covering_reducts(cover([INF, 1], ["ab", "x"]))[0]
    with pytest.raises(ValueError, match="unknown fiber"):
        kernel_membership(two, {("O1", 0): FLIP, ("O2", 1): (0,)})
    with pytest.raises(ValueError, match="missing"):
        kernel_membership(two, {("O1", 0): FLIP})
    with pytest.raises(InvalidStructure):
        kernel_membership(one_orbit_reduct([], [FLIP]), {("O1", 0): FLIP})


def test_covering_reducts_of_a_reduct_are_above_it():
    r = one_orbit_reduct([FLIP], [])
    above = enumerate_covering_reducts(r)
    assert len(above) == 2
    assert all(covering_contains(x, r) for x in above)


def test_fiber_caps():
    with pytest.raises(CapExceeded, match="fiber degree cap"):
        count_covering_reducts(cover([INF, INF], ["abcde", "vwxyz"]))
    with caps.override(fiber_order_cap=10):
        with pytest.raises(CapExceeded, match="fiber order cap"):
            count_covering_reducts(cover([INF], ["abcd"]))


def test_reducts_of_dispatch():
    assert len(reducts_of(unary(INF, INF))) == 3
    assert len(reducts_of(cover([INF], ["ab"]))) == 3
    with pytest.raises(TypeError):
        reducts_of("not a structure")


def test_reduct_contains_rejects_other_bases():
    r = ReductOfUnary(unary(INF), ClassPartition([("O1",)]), pg.trivial_group(1))
    with pytest.raises(ValueError):
        reduct_contains(r, swap_reduct())


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([INF, 1]), min_size=1, max_size=3))
def test_reduct_containment_is_a_partial_order(sizes):
    found = list(enumerate_unary_reducts(UnaryStructure.from_sizes(sizes)))
    for a in found:
        assert reduct_contains(a, a)
    for a, b in itertools.permutations(found, 2):
        assert not (reduct_contains(a, b) and reduct_contains(b, a))
    # the one-class reduct (full symmetric group on the class) is always the top
    top = [r for r in found if all(reduct_contains(r, x) for x in found)]
    assert len(top) == 1
