"""Finite descriptions of structures with small orbit growth.

Four kinds of description are supported:

* :class:`UnaryStructure` - named orbits with finite or infinite sizes; the
  automorphism group is the product of the symmetric groups on the orbits.
* :class:`ReductOfUnary` - a unary base, a partition of its orbits into
  classes (each a singleton or infinite), and a finite group permuting the
  classes; the automorphism group is prod Sym(C_i) extended by that group.
* :class:`FiberedStructure` - a strongly trivial finite cover: over each orbit
  of a unary base with sizes in {1, inf} sits a finite label set, and
  automorphisms move base points while keeping labels.
* :class:`CoveringReduct` - a fibered structure plus a subgroup H of
  prod Sym(F_i) and normal subgroups N_i of the projections H_i; the group
  acts on each fiber of orbit i by an element of c_i N_i, where the coset
  tuple (c_i) comes from H.

Infinite orbits are realized as finite truncations (:func:`truncate`) for
brute-force checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from . import permgroup as pg
from .caps import InvalidStructure, CapExceeded
from .permgroup import PermGroup, DomainPartition

INF = "inf"


def is_infinite(size) -> bool:
    return size == INF


@dataclass(frozen=True)
class Orbit:
    name: str
    size: object  # positive int or INF


@dataclass(frozen=True)
class UnaryStructure:
    orbits: tuple

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(
            o if isinstance(o, Orbit) else Orbit(*o) for o in self.orbits))

    @classmethod
    def from_sizes(cls, sizes, prefix="O"):
        return cls(tuple(Orbit(f"{prefix}{i + 1}", s) for i, s in enumerate(sizes)))

    @property
    def names(self) -> list[str]:
        return [o.name for o in self.orbits]

    def size(self, name):
        return self.orbits[self.index(name)].size

    def index(self, name) -> int:
        for i, o in enumerate(self.orbits):
            if o.name == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class ClassPartition:
    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))

    def class_of(self, name) -> int:
        for i, c in enumerate(self.classes):
            if name in c:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class ReductOfUnary:
    base: UnaryStructure
    nabla: ClassPartition
    action: PermGroup

    def class_size(self, i):
        return class_cardinality(self.base, self.nabla.classes[i])

    def singleton_classes(self) -> list[int]:
        return [i for i in range(len(self.nabla.classes)) if self.class_size(i) == 1]


@dataclass(frozen=True)
class FiberedStructure:
    base: UnaryStructure
    fibers: tuple  # per orbit, a tuple of label strings

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(tuple(str(x) for x in f) for f in self.fibers))

    @property
    def fiber_sizes(self) -> list[int]:
        return [len(f) for f in self.fibers]

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for f in self.fibers:
            out.append(acc)
            acc += len(f)
        return out

    def fiber_product(self) -> PermGroup:
        """prod Sym(F_i) acting on the disjoint union of the label sets."""
        return pg.direct_product([pg.symmetric_group(len(f)) for f in self.fibers])


@dataclass(frozen=True)
class CoveringReduct:
    cover: FiberedStructure
    h_generators: tuple = ()  # each a tuple of per-orbit permutations of F_i
    n_generators: tuple = ()  # per orbit, a tuple of permutations of F_i
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        k = len(self.cover.fibers)
        object.__setattr__(self, "h_generators", tuple(
            tuple(tuple(p) for p in h) for h in self.h_generators))
        n_gens = tuple(tuple(tuple(p) for p in gens) for gens in self.n_generators)
        if not n_gens:
            n_gens = ((),) * k
        object.__setattr__(self, "n_generators", n_gens)

    def h_group(self) -> PermGroup:
        if "H" not in self._cache:
            sizes = self.cover.fiber_sizes
            self._cache["H"] = PermGroup(sum(sizes), tuple(embed(h, sizes) for h in self.h_generators))
        return self._cache["H"]

    def h_projection(self, i) -> PermGroup:
        size = self.cover.fiber_sizes[i]
        return PermGroup(size, tuple(h[i] for h in self.h_generators))

    def n_group(self, i) -> PermGroup:
        return PermGroup(self.cover.fiber_sizes[i], self.n_generators[i])


StructureDescription = Union[UnaryStructure, ReductOfUnary, FiberedStructure, CoveringReduct]


def embed(parts, sizes) -> tuple:
    """Per-orbit permutations -> one permutation of the disjoint union."""
    out, off = [], 0
    for p, size in zip(parts, sizes):
        out.extend(off + x for x in p)
        off += size
    return tuple(out)


def split(perm, sizes) -> tuple:
    """Inverse of :func:`embed` for permutations preserving every block."""
    out, off = [], 0
    for size in sizes:
        out.append(tuple(x - off for x in perm[off:off + size]))
        off += size
    return tuple(out)


def base_of(s):
    if isinstance(s, UnaryStructure):
        return s
    if isinstance(s, (ReductOfUnary, FiberedStructure)):
        return s.base
    if isinstance(s, CoveringReduct):
        return s.cover.base
    raise TypeError(f"not a structure description: {type(s).__name__}")


def class_cardinality(base: UnaryStructure, names):
    sizes = [base.size(n) for n in names]
    if any(is_infinite(x) for x in sizes):
        return INF
    return sum(sizes)


# ------------------------------------------------------------------ validation


def _validate_unary(u: UnaryStructure) -> list[str]:
    out = []
    if not u.orbits:
        out.append("a unary structure needs at least one orbit")
    names = [o.name for o in u.orbits]
    if any(not isinstance(n, str) or not n for n in names):
        out.append("orbit names must be nonempty strings")
    if len(set(names)) != len(names):
        out.append("orbit names must be unique")
    for o in u.orbits:
        if not (is_infinite(o.size) or (isinstance(o.size, int) and not isinstance(o.size, bool) and o.size >= 1)):
            out.append(f"orbit {o.name!r}: size must be a positive integer or 'inf'")
    return out


def _validate_reduct(r: ReductOfUnary) -> list[str]:
    out = _validate_unary(r.base)
    if out:
        return out
    flat = [n for c in r.nabla.classes for n in c]
    if any(len(c) == 0 for c in r.nabla.classes):
        out.append("classes must be nonempty")
    if sorted(flat) != sorted(r.base.names) or len(set(flat)) != len(flat):
        out.append("classes must partition the orbit names exactly")
        return out
    for c in r.nabla.classes:
        card = class_cardinality(r.base, c)
        if not (card == 1 or is_infinite(card)):
            out.append(f"class {list(c)} has finite size {card}: every nabla class must be a "
                       "singleton or infinite")
    if out:
        return out
    m = len(r.nabla.classes)
    if r.action.degree != m:
        out.append(f"action must act on the {m} class indices, got degree {r.action.degree}")
        return out
    for g in r.action.generators:
        for i in range(m):
            if (r.class_size(i) == 1) != (r.class_size(g[i]) == 1):
                out.append(f"action generator {list(g)} maps class {i} to class {g[i]} of a "
                           "different cardinality type")
                break
    try:
        r.action.order()
    except CapExceeded as exc:
        out.append(f"action group cannot be materialized: {exc}")
    return out


def _validate_fibered(c: FiberedStructure) -> list[str]:
    out = _validate_unary(c.base)
    if out:
        return out
    for o in c.base.orbits:
        if not (is_infinite(o.size) or o.size == 1):
            out.append(f"orbit {o.name!r} has size {o.size}: a cover base needs every orbit "
                       "to be a singleton or infinite")
    if len(c.fibers) != len(c.base.orbits):
        out.append("need exactly one fiber label set per orbit")
        return out
    for o, f in zip(c.base.orbits, c.fibers):
        if not f:
            out.append(f"fiber over {o.name!r} must be nonempty")
        if len(set(f)) != len(f):
            out.append(f"fiber labels over {o.name!r} must be distinct")
    return out


def _validate_covering(r: CoveringReduct) -> list[str]:
    out = _validate_fibered(r.cover)
    if out:
        return out
    sizes = r.cover.fiber_sizes
    names = r.cover.base.names
    k = len(sizes)
    for h in r.h_generators:
        if len(h) != k:
            out.append("each H generator needs one permutation per orbit")
            return out
        for i, p in enumerate(h):
            try:
                pg.check_perm(p, sizes[i])
            except ValueError as exc:
                out.append(f"H generator on {names[i]!r}: {exc}")
    if len(r.n_generators) != k:
        out.append("need one list of N generators per orbit")
        return out
    for i, gens in enumerate(r.n_generators):
        for p in gens:
            try:
                pg.check_perm(p, sizes[i])
            except ValueError as exc:
                out.append(f"N generator on {names[i]!r}: {exc}")
    if out:
        return out
    try:
        h_group = r.h_group()
        h_group.order()
        for i in range(k):
            h_i = r.h_projection(i)
            n_i = r.n_group(i)
            if not pg.is_subgroup(n_i, h_i):
                out.append(f"N_i ⊲ H_i violated on orbit {names[i]!r}: N_i not contained in H_i")
            elif not pg.is_normal(n_i, h_i):
                out.append(f"N_i ⊲ H_i violated on orbit {names[i]!r}: N_i is not normal in H_i")
        if not out:
            for i in range(k):
                for p in r.n_generators[i]:
                    parts = [pg.identity(s) for s in sizes]
                    parts[i] = p
                    if embed(parts, sizes) not in h_group:
                        out.append(f"prod N_i <= H violated: N generator {list(p)} on orbit "
                                   f"{names[i]!r} is not in H")
    except CapExceeded as exc:
        out.append(f"fiber groups cannot be materialized: {exc}")
    return out


def validate(s) -> list[str]:
    """Violated invariants of a structure description (empty when valid)."""
    if isinstance(s, UnaryStructure):
        return _validate_unary(s)
    if isinstance(s, ReductOfUnary):
        return _validate_reduct(s)
    if isinstance(s, FiberedStructure):
        return _validate_fibered(s)
    if isinstance(s, CoveringReduct):
        return _validate_covering(s)
    return [f"unknown structure type {type(s).__name__}"]


def require_valid(s):
    problems = validate(s)
    if problems:
        raise InvalidStructure(problems)
    return s


# ---------------------------------------------------- canonical congruences


@dataclass(frozen=True)
class SymbolicPartition:
    """An equivalence relation on the (infinite) domain of a description.

    ``kind`` is ``"equality"``, ``"fibers"`` (blocks are the fibers) or
    ``"classes"`` (each entry of ``classes`` is a union of orbits, pulled
    back through the covering map for covers).  Orbits listed in
    ``pointwise`` split into singleton classes; orbits listed in ``merged``
    are finite and jointly form one extra block.
    """
    kind: str
    classes: tuple = ()
    pointwise: tuple = ()
    merged: tuple = ()

    def block_key(self, label):
        orbit, fiber_label, base_index = label
        if orbit in self.merged:
            return ("merged",)
        if self.kind == "equality":
            return ("point", orbit, fiber_label, base_index)
        if self.kind == "fibers":
            return ("fiber", orbit, base_index)
        if orbit in self.pointwise:
            return ("point", orbit, base_index)
        for i, c in enumerate(self.classes):
            if orbit in c:
                return ("class", i)
        raise KeyError(orbit)

    def on_truncation(self, trunc: "Truncation") -> DomainPartition:
        return DomainPartition.from_labels(self.block_key(lab) for lab in trunc.point_labels)


def _finite_points(s) -> int:
    base = base_of(s)
    if isinstance(s, ReductOfUnary):
        return len(s.singleton_classes())
    if isinstance(s, (FiberedStructure, CoveringReduct)):
        cover = s if isinstance(s, FiberedStructure) else s.cover
        return sum(len(f) for o, f in zip(base.orbits, cover.fibers) if not is_infinite(o.size))
    return sum(o.size for o in base.orbits if not is_infinite(o.size))


def nabla(s) -> SymbolicPartition:
    """The finest congruence with finitely many classes."""
    require_valid(s)
    base = base_of(s)
    if isinstance(s, ReductOfUnary):
        return SymbolicPartition("classes", s.nabla.classes)
    if isinstance(s, UnaryStructure):
        infinite = tuple((o.name,) for o in base.orbits if is_infinite(o.size))
        singles = tuple((o.name,) for o in base.orbits if o.size == 1)
        ordered = tuple(c for c in ((o.name,) for o in base.orbits) if c in infinite or c in singles)
        pointwise = tuple(o.name for o in base.orbits if not is_infinite(o.size) and o.size > 1)
        return SymbolicPartition("classes", ordered, pointwise)
    return SymbolicPartition("classes", tuple((n,) for n in base.names))


def delta(s) -> SymbolicPartition:
    """The coarsest congruence with finite classes.

    Points in infinite orbits are only related within their fiber; all points
    lying over finite orbits are algebraic over each other and form one block.
    """
    require_valid(s)
    base = base_of(s)
    if isinstance(s, ReductOfUnary):
        finite = tuple(n for i in s.singleton_classes() for n in s.nabla.classes[i])
    else:
        finite = tuple(o.name for o in base.orbits if not is_infinite(o.size))
    covering = isinstance(s, (FiberedStructure, CoveringReduct))
    merged = finite if _finite_points(s) >= 2 and (not covering or len(finite) >= 2) else ()
    return SymbolicPartition("fibers" if covering else "equality", merged=merged)


def nabla_class_count(s) -> int:
    sp = nabla(s)
    base = base_of(s)
    return len(sp.classes) + sum(base.size(n) for n in sp.pointwise)


def skm_parameters(s) -> tuple[int, int]:
    """(k, m): largest Delta block, and number of nabla classes modulo Delta."""
    require_valid(s)
    base = base_of(s)
    finite_pts = _finite_points(s)
    merged = bool(delta(s).merged)
    if isinstance(s, (FiberedStructure, CoveringReduct)):
        cover = s if isinstance(s, FiberedStructure) else s.cover
        k = max(len(f) for f in cover.fibers)
        if merged:
            k = max(k, finite_pts)
        infinite = sum(1 for o in base.orbits if is_infinite(o.size))
        return k, infinite + (1 if infinite < len(base.orbits) else 0)
    k = finite_pts if merged else 1
    if isinstance(s, ReductOfUnary):
        infinite = len(s.nabla.classes) - len(s.singleton_classes())
        return max(k, 1), infinite + (1 if s.singleton_classes() else 0)
    infinite = sum(1 for o in base.orbits if is_infinite(o.size))
    return max(k, 1), infinite + (1 if finite_pts else 0)


def split_finite_orbits(s):
    """Replace every finite orbit by an infinite one (the A(F) construction)."""
    require_valid(s)
    if isinstance(s, UnaryStructure):
        return UnaryStructure(tuple(Orbit(o.name, INF) for o in s.orbits))
    if isinstance(s, ReductOfUnary):
        return ReductOfUnary(split_finite_orbits(s.base), s.nabla, s.action)
    raise TypeError("split_finite_orbits takes a UnaryStructure or ReductOfUnary")


# ------------------------------------------------------------------ truncation


@dataclass(frozen=True)
class Truncation:
    group: PermGroup
    point_labels: tuple  # (orbit name, fiber label or None, base index) per point
    base_sizes: tuple    # (orbit name, number of base points) per orbit

    def point_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.point_labels)}

    def base_points(self) -> list:
        return [(name, b) for name, size in self.base_sizes for b in range(size)]

    def fiber_partition(self) -> DomainPartition:
        return DomainPartition.from_labels((o, b) for o, _, b in self.point_labels)

    def induced_base_action(self, perm):
        """The permutation of base points induced by *perm*, or None if it
        does not map fibers to fibers."""
        bases = self.base_points()
        index = {bp: i for i, bp in enumerate(bases)}
        image = [None] * len(bases)
        for p, (o, _, b) in enumerate(self.point_labels):
            o2, _, b2 = self.point_labels[perm[p]]
            j = index[(o2, b2)]
            i = index[(o, b)]
            if image[i] is None:
                image[i] = j
            elif image[i] != j:
                return None
        return tuple(image)

    def base_group(self) -> PermGroup:
        """prod Sym(base points of orbit) on the base points of the truncation."""
        parts = [pg.symmetric_group(size) for _, size in self.base_sizes]
        return pg.direct_product(parts)

    def to_json(self) -> dict:
        data = self.group.to_json()
        data["points"] = [[o, f, b] for o, f, b in self.point_labels]
        return data


def _sym_gens(points, degree):
    gens = []
    if len(points) >= 2:
        images = list(range(degree))
        images[points[0]], images[points[1]] = points[1], points[0]
        gens.append(tuple(images))
    if len(points) >= 3:
        images = list(range(degree))
        for a, b in zip(points, points[1:] + points[:1]):
            images[a] = b
        gens.append(tuple(images))
    return gens


def _resolve_sizes(base: UnaryStructure, base_sizes) -> dict:
    if isinstance(base_sizes, dict):
        requested = dict(base_sizes)
    elif isinstance(base_sizes, int):
        requested = {o.name: base_sizes for o in base.orbits if is_infinite(o.size)}
    else:
        requested = dict(zip(base.names, base_sizes))
    unknown = set(requested) - set(base.names)
    if unknown:
        raise ValueError(f"unknown orbits in sizes: {sorted(unknown)}")
    out = {}
    for o in base.orbits:
        want = requested.get(o.name)
        if is_infinite(o.size):
            if want is None or want < 1:
                raise ValueError(f"size mismatch: infinite orbit {o.name!r} needs a positive base size")
            out[o.name] = int(want)
        else:
            if want is not None and want != o.size:
                raise ValueError(f"size mismatch: finite orbit {o.name!r} has size {o.size}, got {want}")
            out[o.name] = o.size
    return out


def truncate(s, base_sizes) -> Truncation:
    """A finite permutation group realizing *s* on finitely many base points.

    *base_sizes* maps orbit names to sizes (finite orbits keep their size), or
    is a single integer applied to every infinite orbit.
    """
    require_valid(s)
    base = base_of(s)
    sizes = _resolve_sizes(base, base_sizes)
    if isinstance(s, (FiberedStructure, CoveringReduct)):
        cover = s if isinstance(s, FiberedStructure) else s.cover
        labels = [(o.name, f, b) for o, fib in zip(base.orbits, cover.fibers)
                  for b in range(sizes[o.name]) for f in fib]
    else:
        labels = [(o.name, None, b) for o in base.orbits for b in range(sizes[o.name])]
    index = {lab: i for i, lab in enumerate(labels)}
    degree = len(labels)
    gens = []

    if isinstance(s, UnaryStructure):
        for o in base.orbits:
            gens += _sym_gens([index[(o.name, None, b)] for b in range(sizes[o.name])], degree)
    elif isinstance(s, ReductOfUnary):
        class_points = [[index[(n, None, b)] for n in c for b in range(sizes[n])]
                        for c in s.nabla.classes]
        for pts in class_points:
            gens += _sym_gens(pts, degree)
        for a in s.action.generators:
            images = list(range(degree))
            for j, pts in enumerate(class_points):
                target = class_points[a[j]]
                if len(target) != len(pts):
                    raise ValueError(f"size mismatch: classes {j} and {a[j]} are related by the "
                                     f"action but truncate to {len(pts)} and {len(target)} points")
                for p, q in zip(pts, target):
                    images[p] = q
            gens.append(tuple(images))
    else:
        cover = s if isinstance(s, FiberedStructure) else s.cover
        for o, fib in zip(base.orbits, cover.fibers):
            n_base = sizes[o.name]
            for sigma in _sym_gens(list(range(n_base)), n_base):
                images = list(range(degree))
                for b in range(n_base):
                    for f in fib:
                        images[index[(o.name, f, b)]] = index[(o.name, f, sigma[b])]
                gens.append(tuple(images))
        if isinstance(s, CoveringReduct):
            for h in s.h_generators:
                images = list(range(degree))
                for i, (o, fib) in enumerate(zip(base.orbits, cover.fibers)):
                    for b in range(sizes[o.name]):
                        for x, f in enumerate(fib):
                            images[index[(o.name, f, b)]] = index[(o.name, fib[h[i][x]], b)]
                gens.append(tuple(images))
            for i, (o, fib) in enumerate(zip(base.orbits, cover.fibers)):
                for nu in s.n_generators[i]:
                    images = list(range(degree))
                    for x, f in enumerate(fib):
                        images[index[(o.name, f, 0)]] = index[(o.name, fib[nu[x]], 0)]
                    gens.append(tuple(images))
    gens = [g for g in gens if not pg.is_identity(g)]
    return Truncation(PermGroup(degree, tuple(gens)), tuple(labels),
                      tuple((o.name, sizes[o.name]) for o in base.orbits))


def unary_as_reduct(u: UnaryStructure) -> ReductOfUnary:
    """Rewrite u over its singleton-or-infinite refinement.

    Each finite orbit of size > 1 is split into named singleton orbits
    ``name#j``; the symmetric group on those points becomes part of the class
    action.  Structures already in U* come back with the discrete partition
    and trivial action.
    """
    require_valid(u)
    orbits, classes = [], []
    finite_groups = []
    for o in u.orbits:
        if is_infinite(o.size) or o.size == 1:
            orbits.append(o)
            classes.append((o.name,))
        else:
            members = []
            for j in range(o.size):
                name = f"{o.name}#{j}"
                orbits.append(Orbit(name, 1))
                members.append(len(classes))
                classes.append((name,))
            finite_groups.append(members)
    m = len(classes)
    gens = []
    for members in finite_groups:
        for local in pg.symmetric_group(len(members)).generators:
            images = list(range(m))
            for a, b in enumerate(local):
                images[members[a]] = members[b]
            gens.append(tuple(images))
    return ReductOfUnary(UnaryStructure(tuple(orbits)), ClassPartition(tuple(classes)),
                         PermGroup(m, tuple(gens)))
