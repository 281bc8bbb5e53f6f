"""Counting set partitions with bounded block size, in exact integer arithmetic.

``p_k(k, n)`` is the number of partitions of an n-set whose blocks all have at
most k elements (OEIS A229223 family), ``s_k(k, n)`` the number of partitions
of a kn-set into blocks of exactly k elements.  The two ``check_*`` functions
decide the growth inequalities for p_k exactly: rational exponents are cleared
by raising both sides to the denominator, so no floating point is involved.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod

import numpy as np

from . import caps
from .caps import OracleRangeExceeded

_lock = threading.Lock()
_pk_tables: dict[int, list[int]] = {}
_bell_table = [1]
_stirling_rows = [[1]]


def bell(n: int) -> int:
    """Number of set partitions of an n-element set."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    with _lock:
        while len(_bell_table) <= n:
            m = len(_bell_table)
            _bell_table.append(sum(comb(m - 1, i) * _bell_table[i] for i in range(m)))
        return _bell_table[n]


def stirling2(n: int, j: int) -> int:
    """Stirling number of the second kind: partitions of an n-set into j blocks."""
    if n < 0 or j < 0:
        raise ValueError("arguments must be nonnegative")
    if j > n:
        return 0
    with _lock:
        while len(_stirling_rows) <= n:
            prev = _stirling_rows[-1]
            m = len(_stirling_rows)
            row = [0] * (m + 1)
            for i in range(1, m + 1):
                row[i] = i * (prev[i] if i < m else 0) + prev[i - 1]
            _stirling_rows.append(row)
        return _stirling_rows[n][j]


def p_k(k: int, n: int) -> int:
    """Partitions of {1..n} with all blocks of size <= k.

    Uses the recursion that picks the block of the last element:
    p_k(n) = sum_{i<k} C(n-1, i) p_k(n-1-i).
    """
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    with _lock:
        table = _pk_tables.setdefault(k, [1])
        while len(table) <= n:
            m = len(table)
            table.append(sum(comb(m - 1, i) * table[m - 1 - i] for i in range(min(k, m))))
        return table[n]


def p_k_table(k: int, n_max: int) -> list[int]:
    p_k(k, n_max)
    with _lock:
        return list(_pk_tables[k][: n_max + 1])


def restricted_growth_strings(n: int):
    """Yield every set partition of {0..n-1} as a restricted growth string.

    Position i holds the block id of element i; ids appear in increasing order
    of first occurrence.
    """
    if n == 0:
        yield ()
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[:i+1])

    def rec(i):
        if i == n:
            yield tuple(a)
            return
        for v in range(m[i - 1] + 2):
            a[i] = v
            m[i] = max(m[i - 1], v)
            yield from rec(i + 1)

    yield from rec(1)


def _all_rgs(n: int) -> np.ndarray:
    """Every restricted growth string of length n, one per row."""
    rows = np.zeros((1, n), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)  # largest block id used so far, per row
    for i in range(1, n):
        choices = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rows)), choices)
        offsets = np.arange(len(parent)) - np.repeat(np.cumsum(choices) - choices, choices)
        rows = rows[parent]
        rows[:, i] = offsets
        top = np.maximum(top[parent], offsets.astype(np.int8))
    return rows


@lru_cache(maxsize=None)
def _largest_block_histogram(n: int) -> tuple:
    """hist[s] = number of set partitions of [n] whose largest block has size s."""
    if n == 0:
        return (1,)
    rows = _all_rgs(n)
    largest = np.zeros(len(rows), dtype=np.int64)
    for b in range(n):
        largest = np.maximum(largest, (rows == b).sum(axis=1))
    return tuple(int(x) for x in np.bincount(largest, minlength=n + 1))


def p_k_bruteforce(k: int, n: int, cap: int | None = None) -> int:
    """Count partitions with blocks <= k by generating all set partitions."""
    cap = caps.get("oracle_cap", cap)
    if n > cap:
        raise OracleRangeExceeded(f"oracle range exceeded: n={n} > {cap}")
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    return sum(_largest_block_histogram(n)[:k + 1])


def s_k(k: int, n: int) -> int:
    """Partitions of a kn-set into blocks of size exactly k (by recursion)."""
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    value = 1
    for m in range(1, n + 1):
        value *= comb(k * m - 1, k - 1)
    return value


def s_k_closed(k: int, n: int) -> int:
    num = factorial(k * n)
    den = factorial(n) * factorial(k) ** n
    assert num % den == 0
    return num // den


def _rational(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def check_lower_bound(k: int, epsilon, n: int) -> bool:
    """Decide p_k(n) >= n^{((k-1)/k - epsilon) n} exactly."""
    if n < 1:
        raise ValueError("n must be positive")
    q = Fraction(k - 1, k) - _rational(epsilon)
    if q <= 0:
        return True
    a, b = q.numerator, q.denominator
    return p_k(k, n) ** b >= n ** (a * n)


def check_upper_bound_termwise(k: int, d, n: int) -> bool:
    """True iff C(n-1, i) < (1/k) (n (n-1) ... (n-i))^d for every i < k.

    This termwise inequality is sufficient for the inductive step
    sum_i C(n-1, i) (n-1-i)^{d(n-1-i)} < n^{dn}.
    """
    d = _rational(d)
    if not 0 < d < 1:
        raise ValueError("d must lie strictly between 0 and 1")
    if n < 1:
        raise ValueError("n must be positive")
    a, b = d.numerator, d.denominator
    for i in range(k):
        if i > n - 1:
            break  # C(n-1, i) = 0: the term is absent from the recursion
        falling = prod(range(n - i, n + 1))
        if (k * comb(n - 1, i)) ** b >= falling ** a:
            return False
    return True


def lower_bound_onset(k: int, epsilon, n_max: int) -> int | None:
    """Least N such that check_lower_bound holds for every n in [N, n_max].

    Returns None when the check fails at n_max itself.
    """
    onset = None
    for n in range(n_max, 0, -1):
        if not check_lower_bound(k, epsilon, n):
            break
        onset = n
    return onset


def termwise_onset(k: int, d, n_max: int) -> int | None:
    """Least N such that the termwise check holds for every n in (N, n_max]."""
    onset = None
    for n in range(n_max, 0, -1):
        if not check_upper_bound_termwise(k, d, n):
            return onset
        onset = n - 1
    return onset


def _iroot(x: int, b: int) -> int:
    """Floor of the b-th root of a nonnegative integer."""
    if x < 2 or b == 1:
        return x
    r = 1 << ((x.bit_length() + b - 1) // b)
    while True:
        s = ((b - 1) * r + x // r ** (b - 1)) // b
        if s >= r:
            break
        r = s
    while r ** b > x:
        r -= 1
    while (r + 1) ** b <= x:
        r += 1
    return r


@dataclass(frozen=True)
class UpperConstant:
    c: Fraction
    onset: int | None  # least N with the termwise check true on (N, n_max]
    n_max: int


def find_upper_c(k: int, d, n_max: int, max_denominator: int | None = None) -> UpperConstant:
    """Smallest c = r/q (q <= max_denominator) with p_k(n) < c n^{dn} for 1 <= n <= n_max."""
    d = _rational(d)
    if d <= Fraction(k - 1, k) or d >= 1:
        raise ValueError("need (k-1)/k < d < 1")
    qmax = caps.get("upper_c_denominator", max_denominator)
    a, b = d.numerator, d.denominator
    table = p_k_table(k, n_max)
    best = None
    for q in range(1, qmax + 1):
        r_need = 1
        for n in range(1, n_max + 1):
            # smallest r with (r/q)^b n^{an} > p^b, i.e. r^b n^{an} > (q p)^b
            target = (q * table[n]) ** b
            scale = n ** (a * n)
            r = _iroot(target // scale, b)
            while r ** b * scale <= target:
                r += 1
            r_need = max(r_need, r)
        cand = Fraction(r_need, q)
        if best is None or cand < best:
            best = cand
    return UpperConstant(best, termwise_onset(k, d, n_max), n_max)


def verify_upper_c(k: int, d, c, n_max: int) -> bool:
    """Exact check of p_k(n) < c n^{dn} for all 1 <= n <= n_max."""
    d, c = _rational(d), _rational(c)
    a, b = d.numerator, d.denominator
    table = p_k_table(k, n_max)
    return all(
        (table[n] * c.denominator) ** b < c.numerator ** b * n ** (a * n)
        for n in range(1, n_max + 1)
    )
