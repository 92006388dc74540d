"""Best approximation out of finite-dimensional subspaces of mixed l_p-sum spaces.

Distances come with dual certificates (kernel vectors of the basis matrix),
best approximations with duality gaps, and every solver output can be checked
against brute-force oracles.
"""
from .approx import (
    ApproxResult,
    DualCertificate,
    best_approximation,
    bj_orthogonal,
    distance,
    equal_distance_diagnose,
    residual_orthogonality_check,
    restriction_norm_equality,
    uniqueness_certificate,
)
from .dualopt import sphere_max
from .linalg import KernelBasis, SubspaceBasis, null_space
from .space import INF, SpaceSpec, dual_spec, duality_map, norm

__version__ = "0.1.0"

__all__ = [
    "INF",
    "ApproxResult",
    "DualCertificate",
    "KernelBasis",
    "SpaceSpec",
    "SubspaceBasis",
    "best_approximation",
    "bj_orthogonal",
    "distance",
    "dual_spec",
    "duality_map",
    "equal_distance_diagnose",
    "norm",
    "null_space",
    "residual_orthogonality_check",
    "restriction_norm_equality",
    "sphere_max",
    "uniqueness_certificate",
]
