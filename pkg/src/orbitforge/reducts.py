"""Enumerating reducts of unary structures and covering reducts of trivial covers.

Reducts are listed up to interdefinability, i.e. as distinct closed
supergroups of the automorphism group, each given by its symbolic data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial, prod

from . import caps
from . import permgroup as pg
from .caps import CapExceeded
from .partitions import restricted_growth_strings
from .permgroup import PermGroup
from .structures import (
    INF, ClassPartition, CoveringReduct, FiberedStructure, ReductOfUnary,
    UnaryStructure, class_cardinality, embed, is_infinite, require_valid, split,
    unary_as_reduct,
)


@dataclass(frozen=True)
class ReductList:
    items: tuple

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]


# ----------------------------------------------------------- unary reducts


def _type_stabilizer(types) -> PermGroup:
    """Permutations of class indices preserving the singleton/infinite type."""
    m = len(types)
    gens = []
    for t in set(types):
        members = [i for i, x in enumerate(types) if x == t]
        for local in pg.symmetric_group(len(members)).generators:
            images = list(range(m))
            for a, b in enumerate(local):
                images[members[a]] = members[b]
            gens.append(tuple(images))
    return PermGroup(m, tuple(gens))


def reduct_contains(r: ReductOfUnary, s: ReductOfUnary) -> bool:
    """True iff Aut(s) <= Aut(r) for reducts over the same base."""
    if r.base != s.base:
        raise ValueError("reducts over different bases")
    r_of = {n: i for i, c in enumerate(r.nabla.classes) for n in c}
    s_to_r = []
    for c in s.nabla.classes:
        targets = {r_of[n] for n in c}
        if len(targets) != 1:
            return False
        s_to_r.append(targets.pop())
    m = len(r.nabla.classes)
    for a in s.action.generators:
        induced = [None] * m
        for j, target in enumerate(s_to_r):
            image = s_to_r[a[j]]
            if induced[target] is None:
                induced[target] = image
            elif induced[target] != image:
                return False
        if tuple(induced) not in r.action:
            return False
    return True


def _star_form(s):
    """Rewrite s over the singleton-or-infinite refinement of its base."""
    if isinstance(s, UnaryStructure):
        return unary_as_reduct(s)
    star = unary_as_reduct(s.base)
    expand = {}
    for o in s.base.orbits:
        if is_infinite(o.size) or o.size == 1:
            expand[o.name] = (o.name,)
        else:
            expand[o.name] = tuple(f"{o.name}#{j}" for j in range(o.size))
    classes = tuple(tuple(x for n in c for x in expand[n]) for c in s.nabla.classes)
    return ReductOfUnary(star.base, ClassPartition(classes), s.action)


def enumerate_unary_reducts(u, orbit_cap: int | None = None) -> ReductList:
    """All reducts of u (or of a given reduct of a unary structure).

    Every reduct is a pair (P, A): P groups the orbits of the singleton-or-
    infinite refinement into classes that are singletons or infinite, and A
    is a type-preserving group of class permutations; the pair is kept when
    its group contains Aut(u).
    """
    require_valid(u)
    target = _star_form(u)
    base = target.base
    cap = caps.get("reduct_orbit_cap", orbit_cap)
    if len(base.orbits) > cap:
        raise CapExceeded(f"reduct orbit cap exceeded: {len(base.orbits)} orbits > {cap}")
    names = base.names
    items = []
    for rgs in restricted_growth_strings(len(names)):
        blocks = max(rgs) + 1
        classes = tuple(tuple(n for n, b in zip(names, rgs) if b == j) for j in range(blocks))
        cards = [class_cardinality(base, c) for c in classes]
        if any(not (is_infinite(x) or x == 1) for x in cards):
            continue
        types = tuple(is_infinite(x) for x in cards)
        stab = _type_stabilizer(types)
        for a in pg.subgroups_above(pg.trivial_group(blocks), stab):
            r = ReductOfUnary(base, ClassPartition(classes), a)
            if reduct_contains(r, target):
                items.append(r)
    return ReductList(tuple(items))


def count_unary_reducts(u, orbit_cap: int | None = None) -> int:
    return len(enumerate_unary_reducts(u, orbit_cap))


# -------------------------------------------------------- covering reducts


def _check_fiber_caps(c: FiberedStructure):
    sizes = c.fiber_sizes
    deg_cap = caps.get("fiber_degree_cap")
    ord_cap = caps.get("fiber_order_cap")
    if sum(sizes) > deg_cap:
        raise CapExceeded(f"fiber degree cap exceeded: total fiber size {sum(sizes)} > {deg_cap}")
    order = prod(factorial(s) for s in sizes)
    if order > ord_cap:
        raise CapExceeded(f"fiber order cap exceeded: prod |F_i|! = {order} > {ord_cap}")


def _projection(h: PermGroup, sizes, i) -> PermGroup:
    return PermGroup(sizes[i], tuple(split(g, sizes)[i] for g in h.generators))


def _singleton_kernel(h: PermGroup, sizes, i) -> PermGroup:
    """{gamma : (1, .., gamma, .., 1) in H} on F_i."""
    elems = set()
    for e in h.elements():
        parts = split(e, sizes)
        if all(pg.is_identity(p) for j, p in enumerate(parts) if j != i):
            elems.add(parts[i])
    return pg.group_from_elements(sizes[i], elems)


def _embedded_in(n: PermGroup, h_set, sizes, i) -> bool:
    for g in n.generators:
        parts = [pg.identity(s) for s in sizes]
        parts[i] = g
        if embed(parts, sizes) not in h_set:
            return False
    return True


def enumerate_covering_reducts(c, include=None) -> ReductList:
    """All covering reducts of a strongly trivial cover, as (H, N) data.

    For infinite orbits N_i ranges over the normal subgroups of the
    projection H_i that embed in H.  Over a singleton orbit the one fiber
    is not compared with any other, so N_i is fixed to the largest choice
    {gamma : (1, .., gamma, .., 1) in H}; other choices give the same group.
    """
    if isinstance(c, CoveringReduct):
        return enumerate_covering_reducts(c.cover, include=c)
    require_valid(c)
    _check_fiber_caps(c)
    sizes = c.fiber_sizes
    infinite = [is_infinite(o.size) for o in c.base.orbits]
    items = []
    for h in pg.all_subgroups(c.fiber_product()):
        h_set = h.element_set()
        options = []
        for i, size in enumerate(sizes):
            if infinite[i]:
                proj = _projection(h, sizes, i)
                options.append([n for n in pg.normal_subgroups(proj)
                                if _embedded_in(n, h_set, sizes, i)])
            else:
                options.append([_singleton_kernel(h, sizes, i)])
        h_gens = tuple(split(g, sizes) for g in h.generators)
        for ns in itertools.product(*options):
            r = CoveringReduct(c, h_gens, tuple(n.generators for n in ns))
            r._cache["H"] = h
            if include is None or covering_contains(r, include):
                items.append(r)
    return ReductList(tuple(items))


def count_covering_reducts(c) -> int:
    return len(enumerate_covering_reducts(c))


def as_covering_reduct(c: FiberedStructure) -> CoveringReduct:
    """The strongly trivial cover itself: H and every N_i trivial."""
    return CoveringReduct(c, (), tuple(() for _ in c.fibers))


def covering_contains(r: CoveringReduct, s: CoveringReduct) -> bool:
    """True iff the group of s is contained in the group of r (same cover)."""
    if isinstance(s, FiberedStructure):
        s = as_covering_reduct(s)
    if r.cover != s.cover:
        raise ValueError("covering reducts over different covers")
    if not pg.is_subgroup(s.h_group(), r.h_group()):
        return False
    for i, o in enumerate(r.cover.base.orbits):
        if is_infinite(o.size) and not pg.is_subgroup(s.n_group(i), r.n_group(i)):
            return False
    return True


def kernel_membership(r: CoveringReduct, assignment) -> bool:
    """Is the fiberwise action *assignment* in the kernel of r?

    *assignment* maps (orbit name, base index) to a permutation of that
    orbit's labels (by index).  Within each orbit the permutations must lie
    in one coset of N_i in H_i, and a tuple taking one fiber per orbit must
    lie in H.
    """
    require_valid(r)
    base = r.cover.base
    sizes = r.cover.fiber_sizes
    per_orbit = {name: [] for name in base.names}
    for key, perm in sorted(assignment.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        orbit, index = key
        if orbit not in per_orbit:
            raise ValueError(f"unknown fiber: orbit {orbit!r}")
        i = base.index(orbit)
        size = base.orbits[i].size
        if not isinstance(index, int) or index < 0 or (not is_infinite(size) and index >= size):
            raise ValueError(f"unknown fiber: base index {index!r} in orbit {orbit!r}")
        per_orbit[orbit].append(pg.check_perm(perm, sizes[i]))
    missing = [n for n, perms in per_orbit.items() if not perms]
    if missing:
        raise ValueError(f"assignment must touch every orbit; missing {missing}")
    rep = []
    for i, name in enumerate(base.names):
        perms = per_orbit[name]
        h_i = r.h_projection(i)
        n_i = r.n_group(i)
        if any(p not in h_i for p in perms):
            return False
        first_inv = pg.inverse(perms[0])
        if any(pg.compose(p, first_inv) not in n_i for p in perms[1:]):
            return False
        rep.append(perms[0])
    return embed(rep, sizes) in r.h_group()


def distinguishing_assignment(r1: CoveringReduct, r2: CoveringReduct):
    """A fiberwise assignment in exactly one of the two kernels, or None."""
    sizes = r1.cover.fiber_sizes
    names = r1.cover.base.names
    h1, h2 = r1.h_group().element_set(), r2.h_group().element_set()
    for h in sorted(h1 ^ h2):
        return {(n, 0): p for n, p in zip(names, split(h, sizes))}
    for i, o in enumerate(r1.cover.base.orbits):
        if not is_infinite(o.size):
            continue
        n1, n2 = r1.n_group(i).element_set(), r2.n_group(i).element_set()
        for nu in sorted(n1 ^ n2):
            assignment = {(n, 0): pg.identity(s) for n, s in zip(names, sizes)}
            assignment[(o.name, 1)] = nu
            return assignment
    return None


def reducts_of(s) -> ReductList:
    """Reducts of any description, expressed in the enumerators' terms."""
    if isinstance(s, (UnaryStructure, ReductOfUnary)):
        return enumerate_unary_reducts(s)
    if isinstance(s, (FiberedStructure, CoveringReduct)):
        return enumerate_covering_reducts(s)
    raise TypeError(f"not a structure description: {type(s).__name__}")


__all__ = [
    "ReductList", "enumerate_unary_reducts", "count_unary_reducts",
    "enumerate_covering_reducts", "count_covering_reducts", "kernel_membership",
    "reduct_contains", "covering_contains", "distinguishing_assignment",
    "as_covering_reduct", "reducts_of", "INF",
]
