"""Best approximation from finite-dimensional subspaces of l_p-sum spaces.

The distance is computed on the dual side,
``dist(x0, Y) = max{|<x0, z>| : z in W, ||z||_* = 1}`` with ``W`` the
Euclidean kernel of the basis of ``Y``; the minimizer is computed on the
primal side.  The two are paired in :class:`ApproxResult` through the
duality gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .dualopt import affine_norm_min, sphere_max
from .linalg import SubspaceBasis, in_span
from .simplex import linprog_max
from .space import INF, DimensionError, SpaceSpec, dual_spec, norm, norm_gradient

Unique = Literal["yes", "no", "unknown"]

GAP_RTOL = 1e-7
Z_NOISE = 1e-12
SPAN_TOL = 1e-9  # in_span tolerance
UNIQUE_ATOL = 1e-6
N_PROBE_SEEDS = 8


class NotConverged(RuntimeError):
    pass


@dataclass
class DualCertificate:
    z: np.ndarray
    dual_norm: float
    pairing: float
    kernel_residual: float
    degenerate: bool = False


@dataclass
class ApproxResult:
    distance: float
    best_approx: np.ndarray
    residual: np.ndarray
    certificate: DualCertificate
    duality_gap: float
    unique: Unique
    converged: bool = True
    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0))
    warnings: list[str] = field(default_factory=list)


def _basis(Y, spec: SpaceSpec) -> SubspaceBasis:
    if isinstance(Y, SubspaceBasis):
        if Y.dim != spec.dim:
            raise DimensionError(f"basis lives in R^{Y.dim}, space has dimension {spec.dim}")
        return Y
    return SubspaceBasis(Y, spec.dim)


def _kernel_residual(Yb: SubspaceBasis, z) -> float:
    if not Yb.rank:
        return 0.0
    return float(np.max(np.abs(Yb.vectors @ z) / np.linalg.norm(Yb.vectors, axis=1)))


def _certificate(x0, Yb: SubspaceBasis, spec: SpaceSpec, seed: int = 0):
    """Run the dual side.  Returns ``(value, certificate, converged)``."""
    dspec = dual_spec(spec)
    W = Yb.kernel()
    if W.dim == 0:
        z = np.zeros(spec.dim)
        return 0.0, DualCertificate(z, 0.0, 0.0, 0.0, True), True
    # W is the orthogonal complement of span(Y): same test as in_span, no extra SVD
    if Yb.rank and np.linalg.norm(W.project(x0)) <= SPAN_TOL * (1.0 + np.linalg.norm(x0)):
        z = W.vectors[0] / norm(dspec, W.vectors[0])
        return 0.0, DualCertificate(z, norm(dspec, z), float(x0 @ z), _kernel_residual(Yb, z), True), True
    res = sphere_max(x0, W, dspec, seed=seed)
    z = res.maximizer
    cert = DualCertificate(z, norm(dspec, z), float(x0 @ z), _kernel_residual(Yb, z), res.degenerate)
    return res.value, cert, res.converged


def distance(x0, Y, spec: SpaceSpec, seed: int = 0) -> tuple[float, DualCertificate]:
    """``dist(x0, span Y)`` together with the dual certificate attaining it."""
    value, cert, _ = dual_distance(x0, Y, spec, seed)
    return value, cert


def dual_distance(x0, Y, spec: SpaceSpec, seed: int = 0) -> tuple[float, DualCertificate, bool]:
    """:func:`distance` plus the dual solver's convergence flag."""
    x0 = spec.check(x0)
    return _certificate(x0, _basis(Y, spec), spec, seed)


# -- primal solvers -------------------------------------------------------------


def _polyhedral_lp(x0, Yb: SubspaceBasis, p: float):
    """Standard LP reformulation of ``min ||x0 - Y^T c||`` for l_1 / l_inf.

    Variables ``(c+, c-, s)`` with ``s`` the coordinate bounds (l_1) or the
    single bound ``tau`` (l_inf).  Returns the tableau at the optimum so the
    caller can explore the optimal face.
    """
    n, m = x0.size, Yb.rank
    Yt = Yb.vectors.T
    if p == 1.0:
        S = -np.eye(n)
        obj = np.concatenate([np.zeros(2 * m), -np.ones(n)])
    else:
        S = -np.ones((n, 1))
        obj = np.concatenate([np.zeros(2 * m), [-1.0]])
    # x0 - Yt c <= s   and   -(x0 - Yt c) <= s
    A_ub = np.block([[-Yt, Yt, S], [Yt, -Yt, S]])
    b_ub = np.concatenate([-x0, x0])
    # c = 0 with the bounds tight at |x0| is feasible: pivot each bound into
    # the row where x0 is largest in absolute value
    tight = [i if x0[i] >= 0 else n + i for i in range(n)]
    if p == 1.0:
        crash = [(r, 2 * m + (r % n)) for r in tight]
    else:
        crash = [(tight[int(np.argmax(np.abs(x0)))], 2 * m)]
    x, value, tab = linprog_max(obj, A_ub, b_ub, crash=crash)
    return x, -value, tab, Yt


def _polyhedral_primal(x0, Yb: SubspaceBasis, p: float):
    x, _, tab, Yt = _polyhedral_lp(x0, Yb, p)
    m = Yb.rank
    coef = x[:m] - x[m:2 * m]
    return coef, tab, Yt


def _face_spread(tab, Yt, m: int) -> tuple[float, np.ndarray | None, np.ndarray | None]:
    """Largest coordinate range of ``y = Y^T c`` over the LP optimal face.

    Returns ``(spread, y_low, y_high)`` for the worst coordinate.
    """
    worst, lo_y, hi_y = 0.0, None, None
    if tab.face_is_vertex():
        return worst, lo_y, hi_y
    pad = tab.ncols - 2 * m
    for j in range(Yt.shape[0]):
        d = np.concatenate([Yt[j], -Yt[j], np.zeros(pad)])
        ends = []
        for sgn in (1.0, -1.0):
            t = tab.copy()
            t.maximize(sgn * d)
            x = t.solution()
            ends.append(Yt @ (x[:m] - x[m:2 * m]))
        spread = float(ends[0][j] - ends[1][j])
        if spread > worst:
            worst, hi_y, lo_y = spread, ends[0], ends[1]
    return worst, lo_y, hi_y


def _smooth_primal(x0, Yb: SubspaceBasis, spec: SpaceSpec, coef0, max_iter=None):
    kw = {} if max_iter is None else {"max_iter": max_iter}
    res = affine_norm_min(spec, x0, -Yb.vectors.T, s0=coef0, **kw)
    return res.s, res.converged


def _warm_start(x0, Yb: SubspaceBasis, spec: SpaceSpec, value: float, z) -> np.ndarray:
    """Coefficients of ``x0 - value * grad||z||_*``: exact when ``z`` is optimal
    and the norm is smooth, since the optimal residual is aligned with ``z``."""
    if value == 0.0:
        return Yb.coefficients(x0)
    # entries at rounding level are noise, and the duality map of an exponent
    # below 2 would blow them up (|z_i|^(q-1))
    z = np.where(np.abs(z) <= Z_NOISE * np.max(np.abs(z)), 0.0, z)
    r = value * norm_gradient(dual_spec(spec), z)
    return Yb.coefficients(x0 - r)


def _primal(x0, Yb, spec, value, cert, seed):
    """One minimizer's coefficients plus convergence flag."""
    p = spec.plain_p
    if p is not None and (p == 1.0 or math.isinf(p)):
        coef, tab, Yt = _polyhedral_primal(x0, Yb, p)
        return coef, True, (tab, Yt)
    coef0 = _warm_start(x0, Yb, spec, value, cert.z)
    coef, ok = _smooth_primal(x0, Yb, spec, coef0)
    if not all(1.0 < q < INF for q in spec.exponents):
        # nonsmooth mixed spec: subgradient descent from several starts
        rng = np.random.default_rng(seed)
        best = norm(spec, x0 - Yb.combine(coef))
        scale = 1.0 + float(np.linalg.norm(coef))
        for _ in range(N_PROBE_SEEDS):
            c_try, ok_try = _smooth_primal(x0, Yb, spec, coef + scale * rng.standard_normal(coef.size))
            v = norm(spec, x0 - Yb.combine(c_try))
            if v < best:
                coef, ok, best = c_try, ok_try, v
    return coef, ok, None


def best_approximation(x0, Y, spec: SpaceSpec, seed: int = 0) -> ApproxResult:
    """One best approximation to ``x0`` out of ``span Y`` with its certificate.

    Plain l_1 / l_inf use the LP reformulation, other specs gradient descent
    warm-started from the dual solution.  ``unique`` is ``"yes"`` for strictly
    convex specs, or for polyhedral specs when the optimal LP face is a
    single point; ``"no"`` when two minimizers more than ``1e-6`` apart were
    found; ``"unknown"`` otherwise.
    """
    x0 = spec.check(x0)
    Yb = _basis(Y, spec)
    notes = list(Yb.warnings)
    value, cert, dual_ok = _certificate(x0, Yb, spec, seed)
    if not Yb.rank:
        r = x0.copy()
        return ApproxResult(norm(spec, r), np.zeros_like(x0), r, cert,
                            norm(spec, r) - abs(cert.pairing), "yes", dual_ok, np.zeros(0), notes)
    if cert.degenerate and value == 0.0:
        coef = Yb.coefficients(x0)
        y = Yb.combine(coef)
        notes.append("degenerate: x0 in Y")
        return ApproxResult(0.0, y, x0 - y, cert, norm(spec, x0 - y), "yes", True, coef, notes)
    coef, primal_ok, lp = _primal(x0, Yb, spec, value, cert, seed)
    y = Yb.combine(coef)
    r = x0 - y
    dist = norm(spec, r)
    gap = dist - abs(cert.pairing)
    if spec.is_strictly_convex:
        unique: Unique = "yes"
    elif lp is not None:
        spread, _, _ = _face_spread(lp[0], lp[1], Yb.rank)
        unique = "no" if spread > UNIQUE_ATOL else "yes"
    else:
        unique = "unknown"
    # a feasible pair (y, z) with a closed gap certifies both sides even when a
    # stalled subproblem reported otherwise
    certified = abs(gap) <= GAP_RTOL * (1.0 + dist)
    converged = bool((dual_ok and primal_ok) or certified)
    if not converged:
        notes.append(f"not converged (duality gap {gap:.3e})")
    return ApproxResult(dist, y, r, cert, gap, unique, converged, coef, notes)


def probe_minimizers(x0, Y, spec: SpaceSpec, seeds=range(N_PROBE_SEEDS)) -> list[np.ndarray]:
    """Independent minimizers, one per seed.

    Polyhedral specs: a random secondary objective is maximised over the
    optimal LP face, so a non-singleton face shows up as distinct points.
    Other specs: descent from a random start.
    """
    x0 = spec.check(x0)
    Yb = _basis(Y, spec)
    m = Yb.rank
    p = spec.plain_p
    out = []
    if p is not None and (p == 1.0 or math.isinf(p)):
        _, value, tab, Yt = _polyhedral_lp(x0, Yb, p)
        obj = np.zeros(tab.ncols)
        obj[2 * m:tab.n] = -1.0
        tab.restrict_to_optimal_face(obj)
        for seed in seeds:
            d = np.random.default_rng(seed).standard_normal(m)
            t = tab.copy()
            t.maximize(np.concatenate([d, -d]))
            x = t.solution()
            out.append(Yb.combine(x[:m] - x[m:2 * m]))
        return out
    scale = 1.0 + float(np.linalg.norm(x0)) / max(float(np.linalg.norm(Yb.vectors, 2)), 1e-300)
    for seed in seeds:
        c0 = scale * np.random.default_rng(seed).standard_normal(m)
        coef, _ = _smooth_primal(x0, Yb, spec, c0)
        out.append(Yb.combine(coef))
    return out


# -- orthogonality --------------------------------------------------------------

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo: float, hi: float, xtol: float = 1e-13, max_iter: int = 500):
    """Minimize a convex scalar function on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= xtol * (1.0 + abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    cands = [(fc, c), (fd, d), (f(a), a), (f(b), b), (f(0.0), 0.0) if lo <= 0.0 <= hi else (math.inf, 0.0)]
    fx, x = min(cands)
    return x, fx


@dataclass
class OrthoResult:
    orthogonal: bool
    lam: float
    min_value: float
    norm_x: float

    def __bool__(self) -> bool:
        return self.orthogonal


def bj_orthogonality(x, y, spec: SpaceSpec, tol: float = 1e-9) -> OrthoResult:
    """Minimize ``lam -> norm(spec, x + lam y)`` and compare with ``norm(x)``."""
    x, y = spec.check(x), spec.check(y)
    nx = norm(spec, x)
    if nx == 0.0:
        raise ValueError("x must be nonzero")
    ny = norm(spec, y)
    if ny == 0.0:
        return OrthoResult(True, 0.0, nx, nx)
    # |lam| > 2|x|/|y| gives |x + lam y| > |x|, so the minimizer lies inside
    L = 2.0 * nx / ny
    lam, fmin = golden_section(lambda t: norm(spec, x + t * y), -L, L)
    return OrthoResult(fmin >= nx - tol * (1.0 + nx), float(lam), float(fmin), nx)


def bj_orthogonal(x, y, spec: SpaceSpec, tol: float = 1e-9) -> bool:
    """``x ⊥_B y``: ``norm(x + lam y) >= norm(x)`` for every real ``lam``."""
    return bj_orthogonality(x, y, spec, tol).orthogonal


def residual_orthogonality_check(result: ApproxResult, Y, spec: SpaceSpec, tol: float = 1e-7) -> bool:
    """Residual Birkhoff-James orthogonal to each basis vector of ``Y``.

    Checked vector by vector; for one-dimensional ``Y`` or smooth norms this
    is the same as orthogonality to all of ``Y``.
    """
    Yb = _basis(Y, spec)
    r = result.residual
    if not Yb.rank or norm(spec, r) == 0.0:
        return True
    return all(bj_orthogonal(r, y, spec, tol) for y in Yb.vectors)


def restriction_norm_equality(x0, y0, Y, spec: SpaceSpec, rtol: float = 1e-7, seed: int = 0) -> bool:
    """Is ``y0`` a best approximation by the restriction-norm criterion?

    Compares the norm of ``x0 - y0`` restricted to ``W`` (a sphere maximum
    over the kernel in the dual norm) with its full norm.
    """
    x0, y0 = spec.check(x0), spec.check(y0)
    Yb = _basis(Y, spec)
    if Yb.rank and not in_span(y0, Yb.vectors):
        raise ValueError("y0 is not in span(Y)")
    r = x0 - y0
    full = norm(spec, r)
    W = Yb.kernel()
    restricted = 0.0 if W.dim == 0 else sphere_max(r, W, dual_spec(spec), seed=seed).value
    return abs(restricted - full) <= rtol * max(full, restricted, 1e-300) or full == restricted


# -- polyhedral uniqueness and equal distances ---------------------------------


def uniqueness_certificate(x0, Y, spec: SpaceSpec) -> Literal["Sufficient", "Inconclusive"]:
    """Sufficient condition for a unique best approximation in l_1^n / l_inf^n.

    Sufficient iff every point of ``W ∩ S_{X*}`` is smooth.  For ``X = l_1``
    (``X* = l_inf``) that fails iff some ``z in W`` has two coordinates tied at
    ``|z_i| = |z_j| = 1`` with all others in ``[-1, 1]`` (one LP feasibility
    problem per pair and relative sign).  For ``X = l_inf`` (``X* = l_1``) it
    fails iff ``W`` meets some coordinate hyperplane nontrivially.
    """
    if not spec.is_polyhedral:
        raise ValueError("uniqueness_certificate supports plain l_1 and l_inf only")
    spec.check(x0)
    Yb = _basis(Y, spec)
    W = Yb.kernel()
    if W.dim == 0:
        return "Sufficient"
    B = W.columns
    n, k = B.shape
    if math.isinf(spec.plain_p):
        # dual is l_1: a zero coordinate on the sphere exists iff some row of B
        # leaves a nontrivial null space in t
        for i in range(n):
            if k >= 2 or np.linalg.norm(B[i]) <= 1e-12:
                return "Inconclusive"
        return "Sufficient"
    A_box = np.block([[B, -B], [-B, B]])
    b_box = np.ones(2 * n)
    for i in range(n):
        for j in range(i + 1, n):
            for sj in (1.0, -1.0):
                A_eq = np.array([np.concatenate([B[i], -B[i]]), np.concatenate([sj * B[j], -sj * B[j]])])
                try:
                    linprog_max(np.zeros(2 * k), A_box, b_box, A_eq, np.ones(2))
                except Exception:
                    continue
                return "Inconclusive"
    return "Sufficient"


@dataclass
class EqualDistance:
    equal: bool
    witness: tuple[float, int] | None
    distances: tuple[float, float]
    residuals: tuple[np.ndarray, np.ndarray]


def equal_distance_diagnose(x, Y, p1: float, p2: float, atol: float = 1e-7) -> EqualDistance:
    """Compare ``dist_{p1}(x, Y)`` and ``dist_{p2}(x, Y)`` in R^n.

    Equal distances come with the witness ``(lam, j)``: both residuals equal
    ``lam e_j`` and every basis vector has a zero j-th coordinate.
    """
    x = np.asarray(x, float)
    if not (1.0 < p1 < INF and 1.0 < p2 < INF) or p1 == p2:
        raise ValueError("need distinct exponents in (1, inf)")
    n = x.size
    Yb = SubspaceBasis(Y, n)
    if Yb.rank and in_span(x, Yb.vectors):
        raise ValueError("x lies in span(Y)")
    r1 = best_approximation(x, Yb, SpaceSpec.plain(p1, n))
    r2 = best_approximation(x, Yb, SpaceSpec.plain(p2, n))
    if not (r1.converged and r2.converged):
        raise NotConverged("best approximation did not converge")
    d1, d2 = r1.distance, r2.distance
    equal = abs(d1 - d2) <= 1e-7 * max(d1, d2)
    witness = None
    if equal:
        j = int(np.argmax(np.abs(r1.residual)))
        lam = float(r1.residual[j])
        off = np.delete(np.stack([r1.residual, r2.residual]), j, axis=1)
        aligned = (off.size == 0 or np.max(np.abs(off)) <= atol) and abs(r2.residual[j] - lam) <= atol
        in_plane = not Yb.rank or np.max(np.abs(Yb.vectors[:, j])) <= atol * (1.0 + np.max(np.abs(Yb.vectors)))
        if aligned and in_plane:
            witness = (lam, j)
    return EqualDistance(equal, witness, (d1, d2), (r1.residual, r2.residual))
