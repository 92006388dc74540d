"""Dense kernel bases, numerical rank and span membership via the SVD."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .space import DimensionError

DEFAULT_TOL = 1e-10


class DependentBasisWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal basis (rows of ``vectors``) of a numerical kernel."""

    vectors: np.ndarray
    ambient_dim: int
    tol_used: float = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def columns(self) -> np.ndarray:
        """The basis as an ``ambient_dim x dim`` matrix."""
        return self.vectors.T

    def project(self, c) -> np.ndarray:
        """Euclidean projection of ``c`` onto the kernel."""
        return self.vectors.T @ (self.vectors @ np.asarray(c, dtype=float))

    @classmethod
    def full_space(cls, n: int) -> "KernelBasis":
        return cls(np.eye(n), n, 0.0)

    @classmethod
    def spanned_by(cls, vectors, tol: float = DEFAULT_TOL) -> "KernelBasis":
        """Orthonormalise an arbitrary spanning set (handy for tests)."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        _, s, vt = np.linalg.svd(v, full_matrices=False)
        r = numerical_rank(s, tol)
        return cls(vt[:r].copy(), v.shape[1], tol)


def numerical_rank(singular_values, tol: float = DEFAULT_TOL) -> int:
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def as_matrix(rows, ncols: int | None = None) -> np.ndarray:
    m = np.asarray(rows, dtype=float)
    if m.size == 0:
        return np.zeros((0, ncols or 0))
    m = np.atleast_2d(m)
    if ncols is not None and m.shape[1] != ncols:
        raise DimensionError(f"rows have length {m.shape[1]}, expected {ncols}")
    return m


def null_space(M, tol: float = DEFAULT_TOL) -> KernelBasis:
    """Orthonormal basis of ``{z : M z = 0}``.

    Singular values below ``tol * s_max`` count as zero, so the kernel
    dimension is ``cols - numerical_rank``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if M.shape[0] == 0:
        return KernelBasis.full_space(n)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    r = numerical_rank(s, tol)
    return KernelBasis(vt[r:].copy(), n, tol)


def rank(M, tol: float = DEFAULT_TOL) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    return numerical_rank(np.linalg.svd(M, compute_uv=False), tol)


def independent_rows(rows, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, list[str]]:
    """Greedily keep the rows that raise the rank; report what was dropped."""
    M = as_matrix(rows)
    nonzero = [i for i in range(M.shape[0]) if np.any(M[i])]
    if len(nonzero) == M.shape[0] and rank(M, tol) == len(nonzero):
        return M, []
    kept: list[int] = []
    for i in range(M.shape[0]):
        if not np.any(M[i]):
            continue
        if rank(M[kept + [i]], tol) == len(kept) + 1:
            kept.append(i)
    notes = []
    dropped = [i for i in range(M.shape[0]) if i not in kept]
    if dropped:
        notes.append(
            f"basis vectors are linearly dependent; dropped index(es) {dropped}, keeping rank {len(kept)}"
        )
    return M[kept], notes


class SubspaceBasis:
    """Spanning vectors of ``Y`` (rows), reduced to an independent set.

    The kernel ``W = {z : <y_i, z> = 0 for all i}`` is computed on demand.
    """

    def __init__(self, vectors, dim: int | None = None, tol: float = DEFAULT_TOL):
        m = as_matrix(vectors, dim)
        if dim is None:
            dim = m.shape[1]
        m, notes = independent_rows(m, tol) if m.shape[0] else (m.reshape(0, dim), [])
        for note in notes:
            warnings.warn(note, DependentBasisWarning, stacklevel=2)
        self.vectors = m
        self.warnings = notes
        self.tol = tol
        self._dim = dim
        self._kernel = None

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.rank

    def kernel(self) -> KernelBasis:
        if self._kernel is None:
            self._kernel = null_space(self.vectors, self.tol) if self.rank else KernelBasis.full_space(self._dim)
        return self._kernel

    def combine(self, coeffs) -> np.ndarray:
        return np.asarray(coeffs, dtype=float) @ self.vectors if self.rank else np.zeros(self._dim)

    def coefficients(self, y) -> np.ndarray:
        """Least-squares coefficients of ``y`` in this basis."""
        if not self.rank:
            return np.zeros(0)
        return np.linalg.lstsq(self.vectors.T, np.asarray(y, dtype=float), rcond=None)[0]


def span_distance(x, basis) -> float:
    """Euclidean distance from ``x`` to ``span(basis)``."""
    x = np.asarray(x, dtype=float)
    B = as_matrix(basis, x.shape[0])
    if B.shape[0] == 0:
        return float(np.linalg.norm(x))
    _, s, vt = np.linalg.svd(B, full_matrices=False)
    q = vt[:numerical_rank(s)]
    return float(np.linalg.norm(x - q.T @ (q @ x)))


def in_span(x, basis, tol: float = 1e-9) -> bool:
    """True iff ``x`` lies within ``tol * (1 + |x|_2)`` of ``span(basis)``."""
    x = np.asarray(x, dtype=float)
    return span_distance(x, basis) <= tol * (1.0 + np.linalg.norm(x))
