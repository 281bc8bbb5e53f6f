"""Exact growth-bound checks for orbit-count sequences, and a heuristic label.

Every bound is decided by an integer comparison.  The label attached by
:func:`classify` is a heuristic reading of a finite prefix and is reported as
such; the (c, d) verdicts it is based on are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv
from mpmath.libmp import to_rational

from .orbits import OrbitCountSequence

C_GRID = range(1, 17)
D_GRID = sorted({Fraction(a, b) for b in range(2, 11) for a in range(1, b)})
ESTIMATE_BITS = 64


def _as_sequence(seq) -> OrbitCountSequence:
    if isinstance(seq, OrbitCountSequence):
        return seq
    return OrbitCountSequence.from_counts(list(seq))


def verify_exp_bound(seq, c: int) -> bool:
    """count <= c^n for every entry."""
    return all(count <= c ** n for n, count in _as_sequence(seq).entries)


def verify_ndn_bound(seq, c: int, d) -> bool:
    """count <= c * n^{dn} for every entry, compared as count^b <= c^b n^{an}."""
    d = Fraction(d)
    if not 0 < d < 1:
        raise ValueError("d must lie strictly between 0 and 1")
    a, b = d.numerator, d.denominator
    for n, count in _as_sequence(seq).entries:
        if n == 1:
            if count > c:
                return False
        elif count ** b > c ** b * n ** (a * n):
            return False
    return True


def minimal_ndn_c(seq, d, c_max: int = 16):
    """Least c <= c_max with verify_ndn_bound(seq, c, d), or None."""
    if not verify_ndn_bound(seq, c_max, d):
        return None
    lo, hi = 1, c_max
    while lo < hi:
        mid = (lo + hi) // 2
        if verify_ndn_bound(seq, mid, d):
            hi = mid
        else:
            lo = mid + 1
    return lo


def grid_witnesses(seq, d_max=Fraction(9, 10), c_max: int = 16) -> list[tuple[int, Fraction]]:
    """Every (c, d) on the grid (c <= c_max, d = a/b <= d_max, b <= 10) that passes."""
    out = []
    for d in D_GRID:
        if d > Fraction(d_max):
            break
        c = minimal_ndn_c(seq, d, c_max)
        if c is not None:
            out.extend((cc, d) for cc in range(c, c_max + 1))
    return out


@dataclass(frozen=True)
class ExponentEstimate:
    """Enclosure lo <= ln(count) / (n ln n) <= hi."""
    n: int
    lo: Fraction
    hi: Fraction

    def display(self, digits: int = 4) -> str:
        scale = 10 ** digits
        lo = Fraction((self.lo * scale).__floor__(), scale)
        hi = Fraction((self.hi * scale).__ceil__(), scale)
        return f"[{float(lo):.{digits}f}, {float(hi):.{digits}f}]"


def _endpoint(raw) -> Fraction:
    return Fraction(*(int(v) for v in to_rational(raw)))


def exponent_estimates(seq) -> list[ExponentEstimate]:
    out = []
    saved = iv.prec
    iv.prec = ESTIMATE_BITS
    try:
        for n, count in _as_sequence(seq).entries:
            if n < 2 or count < 1:
                continue
            x = iv.log(iv.mpf(count)) / (n * iv.log(iv.mpf(n)))
            lo, hi = x._mpi_
            out.append(ExponentEstimate(n, _endpoint(lo), _endpoint(hi)))
    finally:
        iv.prec = saved
    return out


def _ratios_settle(counts) -> bool:
    """Consecutive ratios are non-increasing, or their changes shrink geometrically."""
    ratios = [Fraction(b, a) for a, b in zip(counts, counts[1:])]
    if len(ratios) < 2:
        return True
    tail = ratios[len(ratios) // 2:] if len(ratios) >= 4 else ratios
    if all(y <= x for x, y in zip(tail, tail[1:])):
        return True
    steps = [y - x for x, y in zip(ratios, ratios[1:])]
    tail_steps = steps[len(steps) // 2:] if len(steps) >= 4 else steps
    if any(s == 0 for s in tail_steps[:-1]):
        return False
    return all(abs(y) <= Fraction(3, 4) * abs(x) for x, y in zip(tail_steps, tail_steps[1:]))


@dataclass(frozen=True)
class GrowthReport:
    estimates: tuple
    exp_witness: int | None          # least c <= 16 with count <= c^n
    ndn_witness: tuple | None        # (c, d) with least d, then least c
    verdicts: tuple                  # ((kind, c, d, holds), ...) in the order checked
    label: str
    heuristic: bool = field(default=True)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "heuristic": self.heuristic,
            "exp_witness": self.exp_witness,
            "ndn_witness": None if self.ndn_witness is None else
            {"c": self.ndn_witness[0], "d": str(self.ndn_witness[1])},
            "estimates": [{"n": e.n, "lo": float(e.lo), "hi": float(e.hi)} for e in self.estimates],
            "verdicts": [{"bound": k, "c": c, "d": None if d is None else str(d), "holds": h}
                         for k, c, d, h in self.verdicts],
        }


def classify(seq) -> GrowthReport:
    seq = _as_sequence(seq)
    if len(seq) < 3:
        raise ValueError("need at least 3 entries to classify")
    counts = seq.counts
    verdicts = []

    exp_witness = None
    for c in C_GRID:
        holds = verify_exp_bound(seq, c)
        verdicts.append(("exp", c, None, holds))
        if holds:
            exp_witness = c
            break

    ndn_witness = None
    for d in D_GRID:
        holds = verify_ndn_bound(seq, C_GRID[-1], d)
        verdicts.append(("ndn", C_GRID[-1], d, holds))
        if holds:
            c = minimal_ndn_c(seq, d, C_GRID[-1])
            verdicts.append(("ndn", c, d, True))
            ndn_witness = (c, d)
            break

    if all(x == counts[0] for x in counts):
        label = "constant"
    elif exp_witness is not None and all(x > 0 for x in counts) and _ratios_settle(counts):
        label = "at-most-exponential"
    elif ndn_witness is not None:
        label = "sub-factorial (d<1)"
    else:
        label = "fast"
    return GrowthReport(tuple(exponent_estimates(seq)), exp_witness, ndn_witness,
                        tuple(verdicts), label)
