import warnings

import numpy as np
import pytest

from bjapprox.instances import MINIMIZATION_BASIS, MINIMIZATION_KERNEL
from bjapprox.linalg import (
    DependentBasisWarning,
    KernelBasis,
    SubspaceBasis,
    in_span,
    null_space,
    rank,
    span_distance,
)
from bjapprox.space import DimensionError


def same_subspace(A, B, tol=1e-10):
    """Mutual projection residuals of two row-spanned subspaces."""
    qa, qb = KernelBasis.spanned_by(A).vectors, KernelBasis.spanned_by(B).vectors
    if qa.shape[0] != qb.shape[0]:
        return False
    ra = qa - qa @ qb.T @ qb
    rb = qb - qb @ qa.T @ qa
    return max(np.abs(ra).max(), np.abs(rb).max()) < tol


def test_null_space_l1_4_example():
    K = null_space([[1, 2, 0, 0], [-1, 0, 2, 0]])
    assert K.dim == 2 and K.ambient_dim == 4
    assert same_subspace(K.vectors, [[1, -0.5, 0.5, 0], [0, 0, 0, 1]])


def test_null_space_minimization_example():
    K = null_space(MINIMIZATION_BASIS)
    assert K.dim == 1
    assert same_subspace(K.vectors, [MINIMIZATION_KERNEL], tol=1e-9)


def test_null_space_identity_is_empty():
    K = null_space(np.eye(4))
    assert K.dim == 0 and K.vectors.shape == (0, 4)


def test_kernel_invariants(rng):
    for _ in range(100):
        m, n = int(rng.integers(1, 6)), int(rng.integers(2, 9))
        M = rng.normal(size=(m, n))
        K = null_space(M)
        assert rank(M) + K.dim == n
        assert np.allclose(K.vectors @ K.vectors.T, np.eye(K.dim), atol=1e-10)
        for y in M:
            for z in K.vectors:
                assert abs(y @ z) <= 1e-9 * np.linalg.norm(y) * np.linalg.norm(z)
        norm_m = np.linalg.norm(M, 2)
        for v in K.vectors:
            assert np.linalg.norm(M @ v) <= K.tol_used * (1 + norm_m * np.linalg.norm(v))


def test_rank_deficient_kernel(rng):
    A = rng.normal(size=(2, 6))
    M = np.vstack([A, A[0] + 2 * A[1]])
    assert rank(M) == 2
    assert null_space(M).dim == 4


def test_in_span_examples():
    basis = [[1, 2, 0, 0], [-1, 0, 2, 0]]
    assert not in_span([1, 1, 1, 1], basis)
    assert in_span([0, 2, 2, 0], basis)
    assert in_span([0, 0, 0, 0], basis)
    assert in_span([0, 0, 0], [[1, 2, 3]])


def test_in_span_dimension_mismatch():
    with pytest.raises(DimensionError):
        in_span([1, 2, 3], [[1, 2]])


def test_span_distance_euclidean():
    assert span_distance([2, 1], [[1, 1]]) == pytest.approx(np.sqrt(2) / 2, rel=1e-14)
    assert span_distance([1, 2], np.zeros((0, 2))) == pytest.approx(np.sqrt(5))


def test_subspace_basis_drops_dependent_rows():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        Y = SubspaceBasis([[1, 0, 0], [2, 0, 0], [0, 1, 0]])
    assert Y.rank == 2
    assert any(issubclass(w.category, DependentBasisWarning) for w in caught)
    assert Y.warnings and "dependent" in Y.warnings[0]


def test_subspace_basis_coefficients(rng):
    V = rng.normal(size=(3, 5))
    Y = SubspaceBasis(V)
    c = rng.normal(size=3)
    assert np.allclose(Y.coefficients(Y.combine(c)), c, atol=1e-12)
    assert Y.kernel().dim == 2


def test_empty_subspace_kernel_is_full_space():
    Y = SubspaceBasis(np.zeros((0, 3)), 3)
    assert Y.rank == 0 and Y.kernel().dim == 3
