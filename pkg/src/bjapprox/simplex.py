"""Small dense tableau simplex with Bland's anti-cycling rule.

Solves ``max c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.  After an
optimum is found the tableau can be restricted to the optimal face, which is
how lexicographic tie-breaking and face-range queries are done: columns whose
reduced cost is strictly negative at an optimal basis are frozen at zero, and
every feasible point of what remains is optimal for the original objective.

Meant for desk-scale problems (a few hundred columns at most).
"""
from __future__ import annotations

import copy

import numpy as np

PIVOT_TOL = 1e-10


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


class Tableau:
    """Simplex tableau over structural variables plus slacks.

    ``x`` is the structural solution; slacks and artificials are internal.
    """

    def __init__(self, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, n=None, tol=PIVOT_TOL, crash=None):
        if crash is not None:
            self._crash_start(A_ub, b_ub, crash, tol)
            return
        A_ub = np.zeros((0, n or 0)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, float))
        A_eq = np.zeros((0, A_ub.shape[1])) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float))
        if A_ub.shape[0] == 0 and A_eq.shape[0]:
            A_ub = np.zeros((0, A_eq.shape[1]))
        b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float).ravel()
        b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).ravel()
        self.n = A_ub.shape[1]
        self.tol = tol
        self.iterations = 0
        m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
        m = m_ub + m_eq
        n_slack = m_ub
        # rows with negative rhs are negated so that b >= 0; those rows and the
        # equality rows get an artificial variable
        A = np.zeros((m, self.n + n_slack))
        b = np.concatenate([b_ub, b_eq])
        A[:m_ub, :self.n] = A_ub
        A[:m_ub, self.n:] = np.eye(m_ub)
        A[m_ub:, :self.n] = A_eq
        flip = b < 0
        A[flip] *= -1.0
        b[flip] *= -1.0
        needs_art = np.concatenate([flip[:m_ub], np.ones(m_eq, bool)])
        art_rows = np.flatnonzero(needs_art)
        n_art = art_rows.size
        T = np.zeros((m, A.shape[1] + n_art))
        T[:, :A.shape[1]] = A
        for k, i in enumerate(art_rows):
            T[i, A.shape[1] + k] = 1.0
        basis = np.empty(m, dtype=int)
        for i in range(m):
            basis[i] = self.n + i if i < m_ub and not flip[i] else -1
        for k, i in enumerate(art_rows):
            basis[i] = A.shape[1] + k
        self.T = T
        self.b = b
        self.basis = basis
        self.ncols = A.shape[1]
        self.active = np.ones(T.shape[1], dtype=bool)
        if n_art:
            self._phase_one(n_art)
        else:
            self.T = T[:, :self.ncols]
            self.active = self.active[:self.ncols]

    def _crash_start(self, A_ub, b_ub, crash, tol) -> None:
        """Start from the slack basis and pivot ``(row, column)`` pairs in.

        The caller promises the resulting basis is feasible, which skips
        phase one entirely.
        """
        A = np.atleast_2d(np.asarray(A_ub, float))
        m, n = A.shape
        self.n, self.tol, self.iterations = n, tol, 0
        self.T = np.hstack([A, np.eye(m)])
        self.b = np.asarray(b_ub, float).ravel().copy()
        self.basis = np.arange(n, n + m)
        self.ncols = n + m
        self.active = np.ones(n + m, dtype=bool)
        for r, j in crash:
            self._pivot(r, j)
        if np.any(self.b < -1e-9 * (1.0 + np.abs(self.b).max())):
            raise LPError("crash basis is infeasible")
        self.b = np.maximum(self.b, 0.0)
        self.iterations = 0

    # -- core pivoting --------------------------------------------------

    def _pivot(self, r: int, j: int) -> None:
        T, b = self.T, self.b
        piv = T[r, j]
        T[r] /= piv
        b[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        nz = np.flatnonzero(np.abs(col) > 0.0)
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
            b[nz] -= col[nz] * b[r]
        b[np.abs(b) < 1e-14] = 0.0
        self.basis[r] = j
        self.iterations += 1

    def reduced_costs(self, c) -> np.ndarray:
        c = np.asarray(c, float)
        return c - c[self.basis] @ self.T

    def _optimize(self, c_full, max_iter: int) -> None:
        tol = self.tol
        for _ in range(max_iter):
            red = self.reduced_costs(c_full)
            red[~self.active] = 0.0
            red[self.basis] = 0.0
            candidates = np.flatnonzero(red > tol)
            if candidates.size == 0:
                return
            j = int(candidates[0])  # Bland: lowest index enters
            col = self.T[:, j]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                raise Unbounded("objective is unbounded on the feasible set")
            ratios = self.b[rows] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tol * max(1.0, abs(best))]
            r = int(ties[np.argmin(self.basis[ties])])  # Bland: lowest basic index leaves
            self._pivot(r, j)
        raise LPError("simplex iteration cap reached")

    def _phase_one(self, n_art: int) -> None:
        total = self.T.shape[1]
        c = np.zeros(total)
        c[self.ncols:] = -1.0
        self._optimize(c, max_iter=50_000)
        if -(c[self.basis] @ self.b) > 1e-8 * max(1.0, float(np.abs(self.b).max(initial=0.0))):
            raise Infeasible("constraints admit no nonnegative solution")
        # drive remaining (zero-level) artificials out of the basis
        keep = np.ones(self.T.shape[0], dtype=bool)
        for r in range(self.T.shape[0]):
            if self.basis[r] >= self.ncols:
                cand = np.flatnonzero(np.abs(self.T[r, :self.ncols]) > self.tol)
                if cand.size:
                    self._pivot(r, int(cand[0]))
                else:
                    keep[r] = False  # redundant row
        self.T = self.T[keep, :self.ncols]
        self.b = self.b[keep]
        self.basis = self.basis[keep]
        self.active = np.ones(self.ncols, dtype=bool)

    # -- public API -----------------------------------------------------

    def _full(self, c) -> np.ndarray:
        c = np.asarray(c, float).ravel()
        full = np.zeros(self.ncols)
        full[:c.size] = c
        return full

    def maximize(self, c, max_iter: int = 50_000) -> float:
        """Optimize ``c.x`` over the current (possibly restricted) feasible set."""
        full = self._full(c)
        self._optimize(full, max_iter)
        return float(full[self.basis] @ self.b)

    def restrict_to_optimal_face(self, c) -> None:
        """Freeze every column that would strictly worsen ``c`` (call at optimum)."""
        red = self.reduced_costs(self._full(c))
        red[self.basis] = 0.0
        self.active &= ~(red < -self.tol)

    def face_is_vertex(self) -> bool:
        """True when every nonbasic column is frozen: the current feasible set
        (after restrictions) is the single basic solution."""
        free = self.active.copy()
        free[self.basis] = False
        return not free.any()

    def solution(self) -> np.ndarray:
        x = np.zeros(self.ncols)
        x[self.basis] = self.b
        return x[:self.n]

    def copy(self) -> "Tableau":
        new = copy.copy(self)
        new.T, new.b, new.basis, new.active = self.T.copy(), self.b.copy(), self.basis.copy(), self.active.copy()
        return new


def linprog_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tiebreak=(), crash=None):
    """Maximize ``c.x``; then lexicographically maximize each of ``tiebreak``
    over the optimal face.  Returns ``(x, value, tableau)``.

    ``crash`` lists ``(row, column)`` pivots from the slack basis of the
    inequality-only problem to a known feasible basis.
    """
    c = np.asarray(c, float)
    if crash is not None and A_eq is not None:
        raise ValueError("a crash basis needs an inequality-only problem")
    tab = Tableau(A_ub, b_ub, A_eq, b_eq, n=c.size, crash=crash)
    value = tab.maximize(c)
    tab.restrict_to_optimal_face(c)
    for d in tiebreak:
        tab.maximize(d)
        tab.restrict_to_optimal_face(d)
    x = tab.solution()
    return x, float(c @ x) if tiebreak else value, tab
