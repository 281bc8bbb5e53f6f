"""Orbit growth of reducts of unary structures and of their finite covers."""

from .caps import CapExceeded, InvalidStructure, OracleRangeExceeded, OrbitForgeError, Unsupported
from .orbits import OrbitCountSequence, count_injective_orbits, count_orbits, crosscheck, orbit_sequence
from .partitions import bell, p_k, p_k_bruteforce, s_k
from .permgroup import PermGroup
from .reducts import (
    count_covering_reducts, count_unary_reducts, enumerate_covering_reducts,
    enumerate_unary_reducts, kernel_membership,
)
from .structures import (
    INF, ClassPartition, CoveringReduct, FiberedStructure, Orbit, ReductOfUnary,
    UnaryStructure, delta, nabla, skm_parameters, split_finite_orbits, truncate, validate,
)

__version__ = "0.1.0"
