"""Explicit finite permutation groups, used as a brute-force oracle.

Permutations are tuples of images over {0, ..., d-1}.  Products compose right
to left: ``compose(p, q)`` applies q first, then p.  Groups store only their
generators; the element set is materialized on demand and refused once it
passes ``order_cap``.

Orbit counts on tuples and subsets are computed without materializing the
group: the action graph of the generators on the enumerated tuples is split
into connected components.  For injective tuples on larger domains there is
also a stabilizer descent (Schreier generators reduced by Sims' filter) that
never enumerates the tuples at all.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, perm as falling

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import caps
from .caps import CapExceeded

Perm = tuple


def identity(degree: int) -> Perm:
    return tuple(range(degree))


def compose(p: Perm, q: Perm) -> Perm:
    """p after q."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def is_identity(p: Perm) -> bool:
    return all(i == j for i, j in enumerate(p))


def check_perm(p, degree=None) -> Perm:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a permutation: {list(p)}")
    if degree is not None and len(p) != degree:
        raise ValueError(f"permutation {list(p)} has degree {len(p)}, expected {degree}")
    return p


def from_cycles(degree: int, *cycles) -> Perm:
    images = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a] = b
    return check_perm(images)


def cycle_string(p: Perm) -> str:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple = ()
    order_cap: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        gens = tuple(check_perm(g, self.degree) for g in self.generators)
        object.__setattr__(self, "generators", gens)

    @property
    def cap(self) -> int:
        return caps.get("order_cap", self.order_cap)

    def elements(self) -> list[Perm]:
        return elements(self)

    def element_set(self) -> frozenset:
        if "set" not in self._cache:
            self._cache["set"] = frozenset(elements(self))
        return self._cache["set"]

    def order(self) -> int:
        return len(self.element_set())

    def __contains__(self, p) -> bool:
        return tuple(p) in self.element_set()

    def __len__(self) -> int:
        return self.order()

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data) -> "PermGroup":
        return cls(int(data["degree"]), tuple(tuple(g) for g in data.get("generators", [])))


def _closure(degree, gens, cap, start=None):
    """All products of *gens* (the generated group) by breadth-first search."""
    ident = identity(degree)
    seen = set(start) if start else {ident}
    frontier = list(seen)
    gens = [g for g in gens if not is_identity(g)]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = compose(g, e)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
                    if len(seen) > cap:
                        raise CapExceeded(f"order cap exceeded: more than {cap} elements")
        frontier = nxt
    return seen


def elements(g: PermGroup) -> list[Perm]:
    """Every element of g, sorted lexicographically by image array."""
    if "elements" not in g._cache:
        g._cache["elements"] = sorted(_closure(g.degree, g.generators, g.cap))
    return list(g._cache["elements"])


def group_from_elements(degree: int, elems) -> PermGroup:
    """A group given by a (closed) element set, with a reduced generator list."""
    gens = sims_filter(degree, sorted(e for e in elems if not is_identity(e)))
    grp = PermGroup(degree, tuple(gens))
    grp._cache["set"] = frozenset(elems) | {identity(degree)}
    grp._cache["elements"] = sorted(grp._cache["set"])
    return grp


# ---------------------------------------------------------------- constructors


def trivial_group(degree: int) -> PermGroup:
    return PermGroup(degree, ())


def symmetric_group(degree: int) -> PermGroup:
    if degree < 2:
        return trivial_group(degree)
    gens = [from_cycles(degree, [0, 1])]
    if degree > 2:
        gens.append(from_cycles(degree, list(range(degree))))
    return PermGroup(degree, tuple(gens))


def cyclic_group(degree: int) -> PermGroup:
    if degree < 2:
        return trivial_group(degree)
    return PermGroup(degree, (from_cycles(degree, list(range(degree))),))


def direct_product(gs) -> PermGroup:
    """Intransitive direct product on the disjoint union of the domains."""
    gs = list(gs)
    total = sum(g.degree for g in gs)
    gens = []
    offset = 0
    for g in gs:
        for s in g.generators:
            images = list(range(total))
            for i, j in enumerate(s):
                images[offset + i] = offset + j
            gens.append(tuple(images))
        offset += g.degree
    return PermGroup(total, tuple(gens))


def imprimitive_wreath(a: PermGroup, m: int, top: PermGroup) -> PermGroup:
    """a wr top acting on F x {0..m-1}; point (f, y) has index y*|F| + f."""
    f = a.degree
    if top.degree != m:
        raise ValueError("top group must act on m points")
    total = f * m
    gens = []
    for y in range(m):
        for s in a.generators:
            images = list(range(total))
            for i in range(f):
                images[y * f + i] = y * f + s[i]
            gens.append(tuple(images))
    for t in top.generators:
        gens.append(tuple(t[y] * f + i for y in range(m) for i in range(f)))
    return PermGroup(total, tuple(gens))


# -------------------------------------------------------- stabilizer machinery


def sims_filter(degree: int, gens) -> list[Perm]:
    """Reduce a generating list to at most d(d-1)/2 elements of the same group."""
    table: dict[tuple[int, int], Perm] = {}
    for g in gens:
        g = tuple(g)
        while True:
            moved = next((i for i in range(degree) if g[i] != i), None)
            if moved is None:
                break
            key = (moved, g[moved])
            h = table.get(key)
            if h is None:
                table[key] = g
                break
            g = compose(inverse(h), g)
    return [table[k] for k in sorted(table)]


def point_orbit(degree: int, gens, point: int) -> dict[int, Perm]:
    """Orbit of *point* with a transversal: maps x to some u with u(point) = x."""
    trans = {point: identity(degree)}
    frontier = [point]
    while frontier:
        nxt = []
        for x in frontier:
            u = trans[x]
            for g in gens:
                y = g[x]
                if y not in trans:
                    trans[y] = compose(g, u)
                    nxt.append(y)
        frontier = nxt
    return trans


def stabilizer_generators(degree: int, gens, point: int) -> list[Perm]:
    """Generators of the point stabilizer from Schreier generators reduced by a Sims filter."""
    trans = point_orbit(degree, gens, point)
    schreier = []
    for x, u in trans.items():
        for g in gens:
            s = compose(inverse(trans[g[x]]), compose(g, u))
            if not is_identity(s):
                schreier.append(s)
    return sims_filter(degree, schreier)


def point_orbits(degree: int, gens, points=None) -> list[list[int]]:
    """Orbits of the generated group on *points* (default: whole domain)."""
    todo = sorted(range(degree) if points is None else points)
    seen, out = set(), []
    for p in todo:
        if p in seen:
            continue
        orb = sorted(point_orbit(degree, gens, p))
        seen.update(orb)
        out.append(orb)
    return out


# ----------------------------------------------------------------- orbit counts


def _components(num_nodes, images_per_gen, nodes_mask=None):
    """Count connected components of the graph i -> img[i] restricted to a mask."""
    if num_nodes == 0:
        return 0
    rows = np.concatenate([np.arange(num_nodes)] * max(1, len(images_per_gen)))
    if images_per_gen:
        cols = np.concatenate(images_per_gen)
    else:
        cols = np.arange(num_nodes)
    keep = cols >= 0
    graph = coo_matrix((np.ones(int(keep.sum()), dtype=np.int8), (rows[keep], cols[keep])),
                       shape=(num_nodes, num_nodes))
    _, labels = connected_components(graph, directed=True, connection="weak")
    if nodes_mask is not None:
        labels = labels[nodes_mask]
    return int(np.unique(labels).size)


def _dense_tuple_images(g: PermGroup, n: int):
    d = g.degree
    idx = np.indices((d,) * n).reshape(n, -1)
    weights = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    images = []
    for s in g.generators:
        s_arr = np.asarray(s, dtype=np.int64)
        images.append(weights @ s_arr[idx])
    return idx, images


def orbit_count_tuples(g: PermGroup, n: int, work_cap: int | None = None) -> int:
    """Number of orbits of g on all n-tuples of points."""
    if n < 1:
        raise ValueError("n must be positive")
    cap = caps.get("work_cap", work_cap)
    total = g.degree ** n
    if total > cap:
        raise CapExceeded(f"work cap exceeded: {total} tuples > {cap}")
    _, images = _dense_tuple_images(g, n)
    return _components(total, images)


def _injective_mask(idx):
    n = idx.shape[0]
    mask = np.ones(idx.shape[1], dtype=bool)
    for i, j in itertools.combinations(range(n), 2):
        mask &= idx[i] != idx[j]
    return mask


def orbit_count_injective(g: PermGroup, n: int, work_cap: int | None = None,
                          method: str = "auto") -> int:
    """Number of orbits of g on injective n-tuples.

    ``method`` is ``"enumerate"`` (components over all tuples, work-capped),
    ``"descent"`` (stabilizer descent) or ``"auto"`` (enumerate when under
    the work cap, otherwise descent).
    """
    if n < 1:
        raise ValueError("n must be positive")
    d = g.degree
    if n > d:
        return 0
    cap = caps.get("work_cap", work_cap)
    if method == "auto":
        method = "enumerate" if d ** n <= cap else "descent"
    if method == "enumerate":
        if d ** n > cap:
            raise CapExceeded(f"work cap exceeded: {d ** n} tuples > {cap}")
        idx, images = _dense_tuple_images(g, n)
        return _components(d ** n, images, _injective_mask(idx))
    if method == "descent":
        return _descent_count(d, list(g.generators), n, ())
    raise ValueError(f"unknown method {method!r}")


def _descent_count(degree, gens, n, fixed):
    if len(fixed) == n:
        return 1
    rest = [p for p in range(degree) if p not in fixed]
    total = 0
    for orb in point_orbits(degree, gens, rest):
        rep = orb[0]
        stab = stabilizer_generators(degree, gens, rep)
        total += _descent_count(degree, stab, n, fixed + (rep,))
    return total


def orbit_count_subsets(g: PermGroup, n: int, work_cap: int | None = None) -> int:
    """Number of orbits of g on n-element subsets of the domain."""
    if n < 1:
        raise ValueError("n must be positive")
    cap = caps.get("work_cap", work_cap)
    total = comb(g.degree, n)
    if total > cap:
        raise CapExceeded(f"work cap exceeded: {total} subsets > {cap}")
    subsets = list(itertools.combinations(range(g.degree), n))
    index = {s: i for i, s in enumerate(subsets)}
    images = [
        np.fromiter((index[tuple(sorted(s[x] for x in sub))] for sub in subsets),
                    dtype=np.int64, count=total)
        for s in g.generators
    ]
    return _components(total, images)


def injective_tuple_count(degree: int, n: int) -> int:
    return falling(degree, n)


# ------------------------------------------------------------ subgroup queries


def pointwise_stabilizer(g: PermGroup, points) -> PermGroup:
    points = list(points)
    if any(not 0 <= p < g.degree for p in points):
        raise ValueError("point outside the domain")
    if not points:
        return g
    keep = [e for e in elements(g) if all(e[p] == p for p in points)]
    return group_from_elements(g.degree, keep)


@dataclass(frozen=True)
class DomainPartition:
    """A partition of {0..d-1} as a restricted growth string of block ids."""
    blocks: tuple

    @classmethod
    def from_labels(cls, labels) -> "DomainPartition":
        ids: dict = {}
        return cls(tuple(ids.setdefault(x, len(ids)) for x in labels))

    def block_list(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for p, b in enumerate(self.blocks):
            out.setdefault(b, []).append(p)
        return [out[b] for b in sorted(out)]

    def num_blocks(self) -> int:
        return len(set(self.blocks))

    def is_invariant(self, gens) -> bool:
        for s in gens:
            image_block: dict[int, int] = {}
            for p, b in enumerate(self.blocks):
                ib = self.blocks[s[p]]
                if image_block.setdefault(b, ib) != ib:
                    return False
        return True

    def meet(self, other: "DomainPartition") -> "DomainPartition":
        return DomainPartition.from_labels(zip(self.blocks, other.blocks))


def _orbitals(g: PermGroup):
    """Symmetrized orbits of g on pairs of distinct points, as sets of pairs."""
    d = g.degree
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    index = {p: k for k, p in enumerate(pairs)}
    if not pairs:
        return []
    images = [
        np.array([index[tuple(sorted((s[i], s[j])))] for i, j in pairs], dtype=np.int64)
        for s in g.generators
    ]
    rows = np.concatenate([np.arange(len(pairs))] * max(1, len(images)))
    cols = np.concatenate(images) if images else np.arange(len(pairs))
    graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)),
                       shape=(len(pairs), len(pairs)))
    _, labels = connected_components(graph, directed=True, connection="weak")
    out: dict[int, list] = {}
    for k, lab in enumerate(labels):
        out.setdefault(int(lab), []).append(pairs[k])
    return [out[k] for k in sorted(out)]


def invariant_partitions(g: PermGroup, cap: int | None = None) -> list[DomainPartition]:
    """Every partition of the domain whose blocks are permuted by g.

    A congruence is a union of symmetrized orbitals, so when there are few
    orbitals their unions are tried; otherwise all set partitions are tested.
    """
    from .partitions import bell, restricted_growth_strings

    cap = caps.get("partition_cap", cap)
    d = g.degree
    if d > cap:
        raise CapExceeded(f"partition enumeration cap exceeded: degree {d} > {cap}")
    found = set()
    orbitals = _orbitals(g)
    if 2 ** len(orbitals) <= bell(d):
        for r in range(len(orbitals) + 1):
            for combo in itertools.combinations(orbitals, r):
                parent = list(range(d))

                def find(x):
                    while parent[x] != x:
                        parent[x] = parent[parent[x]]
                        x = parent[x]
                    return x

                for orb in combo:
                    for i, j in orb:
                        parent[find(i)] = find(j)
                part = DomainPartition.from_labels(find(x) for x in range(d))
                # the join may add pairs outside the chosen orbitals; keep exact unions only
                chosen = {p for orb in combo for p in orb}
                related = {(i, j) for blk in part.block_list() for i, j in itertools.combinations(blk, 2)}
                if related == chosen:
                    found.add(part)
    else:
        for rgs in restricted_growth_strings(d):
            part = DomainPartition(rgs)
            if part.is_invariant(g.generators):
                found.add(part)
    return sorted(found, key=lambda p: p.blocks)


def _coset_reps(ambient: PermGroup, base_set) -> list[Perm]:
    reps, covered = [], set()
    for e in elements(ambient):
        if e in covered:
            continue
        reps.append(e)
        covered.update(compose(e, b) for b in base_set)
    return reps


def subgroups_above(base: PermGroup, ambient: PermGroup, index_cap: int | None = None) -> list[PermGroup]:
    """Every subgroup H with base <= H <= ambient.

    Starting from base, each known subgroup is extended by one coset
    representative at a time; every intermediate subgroup is reachable this
    way.  Exponential in the index, hence the cap.
    """
    cap = caps.get("index_cap", index_cap)
    if base.degree != ambient.degree:
        raise ValueError("groups act on different domains")
    base_set = base.element_set()
    amb_set = ambient.element_set()
    if not base_set <= amb_set:
        raise ValueError("base is not contained in ambient")
    index = len(amb_set) // len(base_set)
    if index > cap:
        raise CapExceeded(f"index cap exceeded: [{len(amb_set)} : {len(base_set)}] = {index} > {cap}")
    reps = _coset_reps(ambient, base_set)
    start = (frozenset(base_set), tuple(base.generators))
    known = {start[0]: start[1]}
    queue = [start]
    while queue:
        elems, gens = queue.pop()
        for r in reps:
            if r in elems:
                continue
            new = frozenset(_closure(base.degree, gens + (r,), len(amb_set), start=elems))
            if new not in known:
                known[new] = gens + (r,)
                queue.append((new, gens + (r,)))
    out = []
    for elems, gens in known.items():
        grp = PermGroup(base.degree, tuple(sims_filter(base.degree, gens)))
        grp._cache["set"] = elems
        grp._cache["elements"] = sorted(elems)
        out.append(grp)
    out.sort(key=lambda h: (len(h._cache["elements"]), h._cache["elements"]))
    return out


def all_subgroups(g: PermGroup) -> list[PermGroup]:
    return subgroups_above(trivial_group(g.degree), g)


def is_normal(sub: PermGroup, g: PermGroup) -> bool:
    elems = sub.element_set()
    return all(compose(compose(s, h), inverse(s)) in elems
               for s in g.generators for h in sub.generators)


def normal_subgroups(g: PermGroup) -> list[PermGroup]:
    """All normal subgroups of g, in canonical order."""
    return [h for h in all_subgroups(g) if is_normal(h, g)]


def is_subgroup(sub: PermGroup, g: PermGroup) -> bool:
    return all(s in g for s in sub.generators)


def same_group(a: PermGroup, b: PermGroup) -> bool:
    return a.degree == b.degree and a.element_set() == b.element_set()
