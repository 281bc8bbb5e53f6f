"""Exact orbit counts for represented structures, with a brute-force cross-check.

Injective n-orbits are counted symbolically:

* unary structures: maps from positions to orbits, finite orbits capped at
  their size;
* reducts of unary structures: Burnside over the class action A, each
  element contributing the maps into its fixed classes;
* covers: an orbit is a set partition of the positions into blocks (positions
  over the same base point), an orbit per block, and a label injection per
  block, taken up to the kernel.  Averaging over H, a block of size s in
  orbit i with coset h_i N_i contributes the number of N_i-orbits on
  injections [s] -> F_i fixed by h_i, which is
  (1/|N_i|) * sum over a in h_i N_i of fix(a)(fix(a)-1)...(fix(a)-s+1).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, perm as falling

from . import caps
from . import permgroup as pg
from .caps import CapExceeded
from .partitions import stirling2
from .structures import (
    INF, CoveringReduct, FiberedStructure, ReductOfUnary, UnaryStructure,
    base_of, embed, is_infinite, require_valid, split, truncate,
)


def _check_n(n, n_cap=None):
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    cap = caps.get("orbit_n_cap", n_cap)
    if n > cap:
        raise CapExceeded(f"orbit n cap exceeded: n={n} > {cap}")


def _unary_count(u: UnaryStructure, n: int) -> int:
    # ways[m]: maps from an m-set of positions to the orbits seen so far
    ways = [1] + [0] * n
    for o in u.orbits:
        cap = n if is_infinite(o.size) else min(o.size, n)
        ways = [sum(comb(m, c) * ways[m - c] for c in range(min(cap, m) + 1)) for m in range(n + 1)]
    return ways[n]


def _capacity_maps(infinite: int, singles: int, n: int) -> int:
    """Maps [n] -> (infinite + singles) targets, singleton targets hit at most once."""
    return sum(comb(n, j) * falling(singles, j) * infinite ** (n - j)
               for j in range(min(singles, n) + 1))


def _reduct_count(r: ReductOfUnary, n: int) -> int:
    singles = set(r.singleton_classes())
    total = 0
    elems = r.action.elements()
    for a in elems:
        fixed = [i for i in range(len(a)) if a[i] == i]
        s = sum(1 for i in fixed if i in singles)
        total += _capacity_maps(len(fixed) - s, s, n)
    if total % len(elems):
        raise ArithmeticError("Burnside sum not divisible by the group order")
    return total // len(elems)


def _fiber_data(s):
    if isinstance(s, FiberedStructure):
        cover = s
        sizes = cover.fiber_sizes
        h_elems = [embed([pg.identity(k) for k in sizes], sizes)]
        n_sets = [[pg.identity(k)] for k in sizes]
    else:
        cover = s.cover
        sizes = cover.fiber_sizes
        h_elems = s.h_group().elements()
        n_sets = [s.n_group(i).elements() for i in range(len(sizes))]
    return cover, sizes, h_elems, n_sets


def _twisted_orbits(c, n_elems, s) -> Fraction:
    """N-orbits on injections [s] -> F fixed by c (c normalizes N)."""
    total = 0
    for nu in n_elems:
        a = pg.compose(c, nu)
        fix = sum(1 for x in range(len(a)) if a[x] == x)
        total += falling(fix, s)
    return Fraction(total, len(n_elems))


def _cover_count(s, n: int) -> int:
    cover, sizes, h_elems, n_sets = _fiber_data(s)
    k = len(sizes)
    singleton = [not is_infinite(o.size) for o in cover.base.orbits]
    cache: dict = {}
    total = Fraction(0)
    for h in h_elems:
        parts = split(h, sizes)
        key = tuple(parts)
        if key not in cache:
            phi = [[_twisted_orbits(parts[i], n_sets[i], t) for t in range(n + 1)] for i in range(k)]

            @lru_cache(maxsize=None)
            def blocks(m, used, phi=tuple(tuple(row) for row in phi)):
                # arrangements of m positions; bit i of used marks a taken singleton orbit
                if m == 0:
                    return Fraction(1)
                acc = Fraction(0)
                for t in range(1, m + 1):
                    ways = comb(m - 1, t - 1)
                    for i in range(k):
                        if t > sizes[i] or phi[i][t] == 0:
                            continue
                        if singleton[i]:
                            if used >> i & 1:
                                continue
                            acc += ways * phi[i][t] * blocks(m - t, used | 1 << i)
                        else:
                            acc += ways * phi[i][t] * blocks(m - t, used)
                return acc

            cache[key] = blocks(n, 0)
        total += cache[key]
    result = total / len(h_elems)
    if result.denominator != 1:
        raise ArithmeticError("orbit count is not an integer")
    return int(result)


def count_injective_orbits(s, n: int, n_cap: int | None = None) -> int:
    """Number of orbits of Aut(s) on injective n-tuples."""
    require_valid(s)
    _check_n(n, n_cap)
    if isinstance(s, UnaryStructure):
        return _unary_count(s, n)
    if isinstance(s, ReductOfUnary):
        return _reduct_count(s, n)
    if isinstance(s, (FiberedStructure, CoveringReduct)):
        return _cover_count(s, n)
    raise TypeError(f"not a structure description: {type(s).__name__}")


def count_orbits(s, n: int, n_cap: int | None = None) -> int:
    """Number of orbits on all n-tuples, summed over equality patterns."""
    _check_n(n, n_cap)
    return sum(stirling2(n, j) * count_injective_orbits(s, j, n_cap) for j in range(1, n + 1))


# --------------------------------------------------------------- sequences


@dataclass(frozen=True)
class OrbitCountSequence:
    entries: tuple  # (n, count) pairs with n strictly increasing

    def __post_init__(self):
        entries = tuple((int(n), int(c)) for n, c in self.entries)
        ns = [n for n, _ in entries]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n must be strictly increasing")
        if any(n < 1 for n in ns) or any(c < 0 for _, c in entries):
            raise ValueError("need positive n and nonnegative counts")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_counts(cls, counts, start=1):
        return cls(tuple((start + i, c) for i, c in enumerate(counts)))

    @property
    def counts(self) -> list[int]:
        return [c for _, c in self.entries]

    def __len__(self):
        return len(self.entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "count"])
        w.writerows(self.entries)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "OrbitCountSequence":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [x.strip() for x in rows[0]] != ["n", "count"]:
            raise ValueError("CSV must start with the header n,count")
        return cls(tuple((int(r[0]), int(r[1])) for r in rows[1:] if r))

    def to_json(self) -> str:
        return json.dumps({"entries": [{"n": n, "count": c} for n, c in self.entries]})

    def to_table(self) -> str:
        width = max([len("count")] + [len(str(c)) for _, c in self.entries])
        lines = [f"{'n':>3}  {'count':>{width}}"]
        lines += [f"{n:>3}  {c:>{width}}" for n, c in self.entries]
        return "\n".join(lines) + "\n"


def orbit_sequence(s, n_max: int, kind: str = "injective", n_cap: int | None = None) -> OrbitCountSequence:
    if kind not in ("injective", "all"):
        raise ValueError("kind must be 'injective' or 'all'")
    _check_n(n_max, n_cap)
    f = count_injective_orbits if kind == "injective" else count_orbits
    return OrbitCountSequence(tuple((n, f(s, n, n_cap)) for n in range(1, n_max + 1)))


# ------------------------------------------------------------- brute force


def crosscheck_sizes(s, per_orbit: int) -> dict:
    """Base sizes giving every infinite orbit at least *per_orbit* points.

    For reducts, classes swapped by the action must truncate to the same
    number of points, so smaller classes are topped up on their first
    infinite orbit.
    """
    base = base_of(s)
    sizes = {o.name: per_orbit for o in base.orbits if is_infinite(o.size)}
    if isinstance(s, ReductOfUnary):
        totals = []
        for c in s.nabla.classes:
            totals.append(sum(sizes.get(name, base.size(name)) for name in c))
        orbits = pg.point_orbits(len(s.nabla.classes), s.action.generators)
        for orb in orbits:
            target = max(totals[j] for j in orb)
            for j in orb:
                gap = target - totals[j]
                if gap:
                    first = next(n for n in s.nabla.classes[j] if is_infinite(base.size(n)))
                    sizes[first] += gap
    return sizes


def truncation_count(s, n: int, sizes, kind: str = "injective", method: str = "auto") -> int:
    trunc = truncate(s, sizes)
    if kind == "injective":
        return pg.orbit_count_injective(trunc.group, n, method=method)
    if kind == "all":
        return pg.orbit_count_tuples(trunc.group, n)
    if kind == "subsets":
        return pg.orbit_count_subsets(trunc.group, n)
    raise ValueError("kind must be 'injective', 'all' or 'subsets'")


@dataclass(frozen=True)
class CrosscheckReport:
    n: int
    symbolic: int | None
    truncated: int
    truncated_larger: int
    sizes: dict
    larger_sizes: dict

    @property
    def stabilized(self) -> bool:
        return self.truncated == self.truncated_larger

    @property
    def agrees(self) -> bool | None:
        if self.symbolic is None:
            return None
        return self.stabilized and self.symbolic == self.truncated

    @property
    def ok(self) -> bool:
        return self.stabilized and self.agrees is not False

    def to_dict(self) -> dict:
        return {"n": self.n, "symbolic": self.symbolic, "truncated": self.truncated,
                "truncated_larger": self.truncated_larger, "stabilized": self.stabilized,
                "agrees": self.agrees, "sizes": self.sizes, "larger_sizes": self.larger_sizes}


def crosscheck(s, n: int, margin: int = 1, method: str = "auto") -> CrosscheckReport:
    """Symbolic count against truncations with 2n and 2n + margin base points."""
    require_valid(s)
    if margin < 1:
        raise ValueError("margin must be positive")
    small = crosscheck_sizes(s, max(2 * n, 2))
    large = crosscheck_sizes(s, max(2 * n, 2) + margin)
    try:
        symbolic = count_injective_orbits(s, n)
    except CapExceeded:
        symbolic = None
    return CrosscheckReport(n, symbolic, truncation_count(s, n, small, method=method),
                            truncation_count(s, n, large, method=method), small, large)


__all__ = [
    "count_injective_orbits", "count_orbits", "OrbitCountSequence", "orbit_sequence",
    "crosscheck", "CrosscheckReport", "crosscheck_sizes", "truncation_count", "INF",
]
