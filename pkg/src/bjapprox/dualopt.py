"""Maximize ``|<c, z>|`` over ``z`` in a subspace ``W`` with ``norm(spec, z) = 1``.

The maximum is the right-hand side of the distance formula
``dist(x0, Y) = max{|<x0, z>| : z in W, ||z||_* = 1}`` where ``W`` is the
Euclidean kernel of the basis of ``Y``.  Every routine works over the ball:
a positive linear maximum over a symmetric convex body sits on its boundary.

Writing ``z = B t`` with ``B`` the orthonormal kernel basis and
``a = B^T c``, the ratio ``|<a, t>| / ||B t||`` is scale-invariant, so the
smooth and mixed solvers minimise ``||B t||`` over the affine slice
``<a, t> = 1``, a convex problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import KernelBasis, null_space
from .simplex import LPError, linprog_max
from .space import INF, SpaceSpec, dual_spec, norm, norm_gradient

CONVERGENCE_RTOL = 1e-11
CONVERGENCE_WINDOW = 5
MAX_ITER = 50_000
N_STARTS = 16


class EmptyKernelError(ValueError):
    """``W = {0}``: the point already lies in the subspace."""


@dataclass
class SphereMaxResult:
    value: float
    maximizer: np.ndarray
    method: str
    iterations: int = 0
    converged: bool = True
    degenerate: bool = False


# -- generic descent on min ||u0 + M s|| -------------------------------------


@dataclass
class DescentResult:
    point: np.ndarray  # u0 + M s
    s: np.ndarray
    value: float
    iterations: int
    converged: bool


def affine_norm_min(spec: SpaceSpec, u0, M, s0=None, max_iter: int = MAX_ITER) -> DescentResult:
    """Minimize ``norm(spec, u0 + M s)`` over ``s``.

    Quasi-Newton descent: BFGS search directions (falling back to the
    negative gradient whenever the model direction is not a descent
    direction) with Armijo backtracking.  Converged when the relative
    objective change stays below ``CONVERGENCE_RTOL`` for
    ``CONVERGENCE_WINDOW`` consecutive iterations or when no step length can
    decrease the objective any further.
    """
    u0 = np.asarray(u0, float)
    M = np.asarray(M, float).reshape(u0.size, -1)
    k = M.shape[1]
    s = np.zeros(k) if s0 is None else np.array(s0, float)
    if k == 0:
        return DescentResult(u0.copy(), s, norm(spec, u0), 0, True)

    def f(s):
        v = u0 + M @ s
        return norm(spec, v), v

    fx, v = f(s)
    g = M.T @ norm_gradient(spec, v)
    H = np.eye(k) * (max(fx, 1e-300) / max(np.linalg.norm(M) ** 2, 1e-300))
    H0 = H.copy()
    quiet = 0
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        gg = float(g @ g)
        if fx == 0.0 or gg <= (1e-15 * max(1.0, fx)) ** 2:
            converged = True
            break
        d = -H @ g
        slope = float(g @ d)
        if not slope < 0.0:
            H = H0.copy()
            d, slope = -H @ g, -float(g @ H @ g)
        t = 1.0
        while True:
            s_new = s + t * d
            f_new, v_new = f(s_new)
            if f_new <= fx + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-30:
                break
        if not f_new < fx:
            if not np.array_equal(H, H0):
                H = H0.copy()  # retry once along the scaled gradient
                continue
            # no descent possible along the negative gradient at float resolution
            converged = True
            break
        g_new = M.T @ norm_gradient(spec, v_new)
        ds, dg = s_new - s, g_new - g
        sy = float(ds @ dg)
        if sy > 1e-12 * float(np.linalg.norm(ds) * np.linalg.norm(dg)):
            rho = 1.0 / sy
            Hy = H @ dg
            H = H + ((sy + float(dg @ Hy)) * rho * rho) * np.outer(ds, ds) - rho * (np.outer(Hy, ds) + np.outer(ds, Hy))
        rel = (fx - f_new) / max(abs(fx), 1e-300)
        s, fx, v, g = s_new, f_new, v_new, g_new
        quiet = quiet + 1 if rel < CONVERGENCE_RTOL else 0
        if quiet >= CONVERGENCE_WINDOW:
            converged = True
            break
    return DescentResult(v, s, fx, it, converged)


# -- sphere maximisation --------------------------------------------------------


def _check(c, W: KernelBasis) -> np.ndarray:
    if W.dim == 0:
        raise EmptyKernelError("kernel is {0}; the point lies in the subspace")
    c = np.asarray(c, float)
    if c.shape != (W.ambient_dim,):
        raise ValueError(f"c has shape {c.shape}, kernel lives in R^{W.ambient_dim}")
    if not np.all(np.isfinite(c)):
        raise ValueError("c must be finite")
    return c


def _orient(z, c) -> np.ndarray:
    return -z if float(c @ z) < 0 else z


def _orthogonal(a, c) -> bool:
    return float(np.linalg.norm(a)) <= 1e-12 * (1.0 + float(np.linalg.norm(c)))


def _degenerate(W: KernelBasis, spec: SpaceSpec) -> SphereMaxResult:
    z = W.vectors[0]
    return SphereMaxResult(0.0, z / norm(spec, z), "closed_form", 0, True, True)


def _lex_directions(c, B) -> list[np.ndarray]:
    """Tie-break objectives: maximize ``sign(c_i) z_i`` for i = 1, 2, ...

    (``+z_i`` where ``c_i = 0``)."""
    sgn = np.where(c < 0, -1.0, 1.0)
    return [sgn[i] * B[i] for i in range(B.shape[0])]


def polytope_linmax(c, W: KernelBasis, ball: str) -> SphereMaxResult:
    """Exact maximum of ``<c, z>`` over ``W`` intersected with the unit ball of
    l_inf (``ball="box"``) or l_1 (``ball="crosspolytope"``).

    The LP runs in kernel coordinates ``t = t+ - t-``; the returned maximizer
    is a vertex of ``W ∩ ball``.  Ties between optimal vertices are broken by
    lexicographically maximising ``sign(c_i) z_i``.
    """
    c = _check(c, W)
    B = W.columns
    n, k = B.shape
    a = B.T @ c
    if ball == "box":
        # t+, t- >= 0 ;  B(t+ - t-) <= 1 ; -B(t+ - t-) <= 1
        A_ub = np.block([[B, -B], [-B, B]])
        b_ub = np.ones(2 * n)
        obj = np.concatenate([a, -a])
        lift = lambda d: np.concatenate([d, -d])  # noqa: E731
    elif ball == "crosspolytope":
        # t+, t-, s >= 0 ;  B t - s <= 0 ; -B t - s <= 0 ; sum s <= 1
        I = np.eye(n)
        A_ub = np.block([
            [B, -B, -I],
            [-B, B, -I],
            [np.zeros((1, 2 * k)), np.ones((1, n))],
        ])
        b_ub = np.concatenate([np.zeros(2 * n), [1.0]])
        obj = np.concatenate([a, -a, np.zeros(n)])
        lift = lambda d: np.concatenate([d, -d, np.zeros(n)])  # noqa: E731
    else:
        raise ValueError(f"unknown ball {ball!r}")
    tiebreak = [lift(d) for d in _lex_directions(c, B)]
    try:
        x, _, tab = linprog_max(obj, A_ub, b_ub, tiebreak=tiebreak)
    except LPError as exc:  # pragma: no cover - feasible and bounded by construction
        raise RuntimeError(f"internal LP failure: {exc}") from exc
    t = x[:k] - x[k:2 * k]
    z = B @ t
    z[np.abs(z) < 1e-15] = 0.0
    return SphereMaxResult(float(c @ z), z, "lp_vertex", tab.iterations, True, _orthogonal(a, c))


def _closed_form(c, W: KernelBasis, spec: SpaceSpec) -> SphereMaxResult:
    # one-dimensional W: the sphere is {±z/||z||}
    z = W.vectors[0]
    z = _orient(z / norm(spec, z), c)
    return SphereMaxResult(abs(float(c @ z)), z, "closed_form", 0, True, _orthogonal(W.vectors @ c, c))


def _slice_frame(a):
    """Point ``t0`` with ``<a, t0> = 1`` and an orthonormal basis ``N`` of ``a^perp``."""
    k = a.size
    t0 = a / float(a @ a)
    q, _ = np.linalg.qr(np.column_stack([a, np.eye(k)]))
    N = q[:, 1:k]
    return t0, N


def _slice_descent(spec, B, a, t_start, max_iter):
    t0, N = _slice_frame(a)
    s0 = N.T @ (t_start / float(a @ t_start) - t0)
    res = affine_norm_min(spec, B @ t0, B @ N, s0=s0, max_iter=max_iter)
    return res


def _from_slice(res, c, spec, method) -> SphereMaxResult:
    z = res.point / res.value
    z = _orient(z / norm(spec, z), c)
    return SphereMaxResult(1.0 / res.value, z, method, res.iterations, res.converged)


def smooth_sphere_max(c, W: KernelBasis, q: float, max_iter: int = MAX_ITER) -> SphereMaxResult:
    """Sphere maximum for plain l_q, 1 < q < inf: ``1 / min{||B t||_q : <a, t> = 1}``."""
    c = _check(c, W)
    if not 1.0 < q < INF:
        raise ValueError("smooth_sphere_max needs 1 < q < inf")
    spec = SpaceSpec.plain(q, W.ambient_dim)
    a = W.vectors @ c
    if _orthogonal(a, c):
        return _degenerate(W, spec)
    if W.dim == 1:
        return _closed_form(c, W, spec)
    res = _slice_descent(spec, W.columns, a, a, max_iter)
    return _from_slice(res, c, spec, "smooth_ascent")


def _weak_duality_bound(c, W: KernelBasis, spec: SpaceSpec, z: np.ndarray, value: float):
    """Primal upper bound ``min_{y ⊥ W} ||c - y||_primal`` started from the
    point suggested by ``z``; returns ``(bound, converged)``.

    Any ``y`` in ``W^perp`` gives ``||c - y||_primal >= value`` for a feasible
    dual value, so the gap certifies the ascent result.
    """
    primal = dual_spec(spec)
    perp = null_space(W.vectors, W.tol_used).columns  # basis of W^perp
    if perp.shape[1] == 0:
        return norm(primal, c), True
    r0 = value * norm_gradient(spec, z)
    s0 = np.linalg.lstsq(perp, c - r0, rcond=None)[0]
    res = affine_norm_min(primal, c, -perp, s0=s0)
    return res.value, res.converged


def mixed_ascent(c, W: KernelBasis, spec: SpaceSpec, seed: int = 0, n_starts: int | None = None,
                 max_iter: int = MAX_ITER) -> SphereMaxResult:
    """Multi-start ascent of ``|<c, Bt>| / norm(spec, Bt)`` for mixed specs.

    Each start is pushed onto the slice ``<a, t> = 1`` and descended.  The
    Euclidean projection of ``c`` is always one of the starts; the others come
    from ``numpy.random.default_rng(seed)``.  Specs whose exponents all lie in
    (1, inf) give a smooth convex slice problem, so only the projection start
    runs there unless ``n_starts`` is given.  The best result is checked
    against a primal upper bound and flagged not converged when the gap
    exceeds ``1e-7 (1 + value)``.
    """
    c = _check(c, W)
    a = W.vectors @ c
    if _orthogonal(a, c):
        return _degenerate(W, spec)
    if W.dim == 1:
        return _closed_form(c, W, spec)
    if n_starts is None:
        smooth = all(1.0 < p < INF for p in spec.exponents)
        n_starts = 0 if smooth else N_STARTS
    B = W.columns
    rng = np.random.default_rng(seed)
    starts = [a]
    for _ in range(n_starts):
        t = rng.standard_normal(W.dim)
        if abs(t @ a) < 1e-8 * np.linalg.norm(t) * np.linalg.norm(a):
            continue
        starts.append(t)
    best = None
    total_iter = 0
    for t in starts:
        res = _slice_descent(spec, B, a, t, max_iter)
        total_iter += res.iterations
        # strict comparison keeps the earliest start on ties: order-deterministic
        if best is None or res.value < best.value:
            best = res
    out = _from_slice(best, c, spec, "mixed_ascent")
    out.iterations = total_iter
    bound, ok = _weak_duality_bound(c, W, spec, out.maximizer, out.value)
    out.converged = bool(best.converged and ok and bound - out.value <= 1e-7 * (1.0 + out.value))
    return out


def sphere_max(c, W: KernelBasis, spec: SpaceSpec, seed: int = 0) -> SphereMaxResult:
    """``max{|<c, z>| : z in W, norm(spec, z) = 1}`` with solver dispatch.

    One-dimensional ``W`` is solved in closed form; plain l_1 / l_inf go to
    :func:`polytope_linmax`, plain l_q to :func:`smooth_sphere_max`, anything
    else to :func:`mixed_ascent`.  When ``c`` is Euclidean-orthogonal to ``W``
    the value is 0 and the maximizer an arbitrary unit vector of ``W``.
    """
    c = _check(c, W)
    a = W.vectors @ c
    if _orthogonal(a, c):
        return _degenerate(W, spec)
    if W.dim == 1:
        return _closed_form(c, W, spec)
    p = spec.plain_p
    if p is not None and math.isinf(p):
        return polytope_linmax(c, W, "box")
    if p == 1.0:
        return polytope_linmax(c, W, "crosspolytope")
    if p is not None:
        return smooth_sphere_max(c, W, p)
    return mixed_ascent(c, W, spec, seed=seed)
