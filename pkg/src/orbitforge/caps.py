"""Resource caps and the error types raised when they are exceeded.

Every exhaustive routine in the package checks one of these caps before doing
work, so a request that is too big fails loudly instead of running forever.
Defaults can be overridden per call, per context (:func:`override`), or from
the ``ORBITFORGE_CAPS`` environment variable (``key=value`` pairs separated by
commas or whitespace).
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
import os
import re


class OrbitForgeError(Exception):
    """Base class for errors raised by this package."""


class CapExceeded(OrbitForgeError):
    """A configured resource cap would be exceeded."""


class OracleRangeExceeded(CapExceeded):
    """An exhaustive oracle was asked for an input beyond its range."""


class InvalidStructure(OrbitForgeError):
    """A structure description violates one of its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class Unsupported(OrbitForgeError):
    """The requested computation is not available for this input."""


@dataclasses.dataclass(frozen=True)
class Caps:
    order_cap: int = 10**6          # elements materialized per group
    work_cap: int = 2 * 10**6       # tuples / subsets enumerated per orbit count
    partition_cap: int = 12         # degree cap for invariant partition search
    index_cap: int = 10**4          # [ambient : base] in subgroup enumeration
    oracle_cap: int = 13            # n cap for the brute-force partition oracle
    orbit_n_cap: int = 8            # n cap for symbolic orbit counting
    reduct_orbit_cap: int = 6       # number of orbits for unary reduct enumeration
    fiber_degree_cap: int = 8       # sum of fiber sizes for covering reducts
    fiber_order_cap: int = 10**4    # prod of |F_i|! for covering reducts
    upper_c_denominator: int = 64   # denominator bound in find_upper_c


_FIELDS = {f.name for f in dataclasses.fields(Caps)}


def parse_caps(text, base=None):
    """Parse ``key=value`` pairs into a :class:`Caps` built on top of *base*."""
    base = base or Caps()
    updates = {}
    for item in re.split(r"[,\s]+", text.strip()):
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _FIELDS:
            raise ValueError(f"bad cap setting {item!r}")
        updates[key] = int(value)
        if updates[key] < 1:
            raise ValueError(f"cap {key} must be positive")
    return dataclasses.replace(base, **updates)


def _initial_caps():
    env = os.environ.get("ORBITFORGE_CAPS")
    return parse_caps(env) if env else Caps()


_current: contextvars.ContextVar[Caps | None] = contextvars.ContextVar("orbitforge_caps", default=None)


def current() -> Caps:
    caps = _current.get()
    if caps is None:
        caps = _initial_caps()
        _current.set(caps)
    return caps


@contextlib.contextmanager
def override(**kwargs):
    """Temporarily replace some caps in the current context."""
    token = _current.set(dataclasses.replace(current(), **kwargs))
    try:
        yield current()
    finally:
        _current.reset(token)


def get(name, value=None):
    return getattr(current(), name) if value is None else value
