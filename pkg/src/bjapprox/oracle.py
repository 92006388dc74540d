"""Brute-force checks that share no code path with the solvers.

The primal oracle grid-searches the coefficient box and zooms in; the dual
oracle samples directions of the kernel from a scrambled Sobol sequence and
then zooms in on the slice through the best direction.  Both rely only on
convexity and on ``space.norm``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .approx import golden_section
from .dualopt import sphere_max
from .linalg import KernelBasis, SubspaceBasis, null_space
from .space import INF, SpaceSpec, conjugate_exponent, dual_spec, norm

MAX_ORACLE_DIM = 4
HOLDER_SLACK = 1e-10
REFINE_POINTS = 11  # per dimension, in the local phase of the zoom
REFINE_ROTATIONS = 4


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    grid_points_per_dim: int = 41
    refine_rounds: int = 6
    seed: int = 0
    trials: int = 1000

    def __post_init__(self):
        g = self.grid_points_per_dim
        if g < 3 or g % 2 == 0:
            raise ValueError("grid_points_per_dim must be odd and >= 3")
        if self.refine_rounds < 0 or self.trials < 0 or self.seed < 0:
            raise ValueError("refine_rounds, trials and seed must be nonnegative")


def _norms(spec: SpaceSpec, V: np.ndarray) -> np.ndarray:
    """Row-wise ``norm(spec, v)``, vectorised."""
    A = np.abs(V)
    blocks = []
    for s, (d, p) in zip(spec.offsets, spec.blocks):
        b = A[:, s:s + d]
        if math.isinf(p):
            blocks.append(b.max(axis=1))
        elif p == 1.0:
            blocks.append(b.sum(axis=1))
        else:
            blocks.append((b ** p).sum(axis=1) ** (1.0 / p))
    if len(blocks) == 1:
        return blocks[0]
    bn = np.stack(blocks, axis=1)
    p = spec.outer_p
    if math.isinf(p):
        return bn.max(axis=1)
    if p == 1.0:
        return bn.sum(axis=1)
    return (bn ** p).sum(axis=1) ** (1.0 / p)


def _cube(k: int, g: int) -> np.ndarray:
    axis = np.linspace(-1.0, 1.0, g)
    return np.array(list(itertools.product(axis, repeat=k))) if k else np.zeros((1, 0))


def _random_rotation(rng, k: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def _zoom_minimize(f, center: np.ndarray, radius: float, cfg: OracleConfig, rtol: float = 1e-10):
    """Grid search of a convex ``f`` on a cube, re-centring and shrinking.

    The first pass covers the whole cube, then each pass narrows to four
    grid steps around the best point.  Afterwards the cube is recentred
    on a coarser pattern (and rotated copies of it) while that improves
    ``f`` and halved once the centre wins, which follows narrow valleys of
    nonsmooth norms.  Stops when the half-width drops
    below ``rtol * (1 + radius)``.  Returns ``(best_point, best_value)``.
    """
    g = cfg.grid_points_per_dim
    coarse = _cube(center.size, g)
    fine = _cube(center.size, min(g, REFINE_POINTS))
    best, fbest = center, float(f(center[None, :])[0])
    half = radius

    def sweep(offsets):
        nonlocal best, fbest
        vals = f(best + half * offsets)
        i = int(np.argmin(vals))
        if vals[i] < fbest:
            best, fbest = best + half * offsets[i], float(vals[i])
            return True
        return False

    for _ in range(cfg.refine_rounds + 1):
        sweep(coarse)
        half *= 8.0 / (g - 1)
    # the rotated copies add search directions at kinks of polyhedral norms
    rng = np.random.default_rng(cfg.seed)
    k = center.size
    patterns = [fine] + [fine @ _random_rotation(rng, k) for _ in range(REFINE_ROTATIONS)]
    floor = rtol * (1.0 + radius)
    for _ in range(10_000):
        if half < floor:
            break
        if any(sweep(P) for P in patterns):
            half = min(2.0 * half, radius)
        else:
            half *= 0.25
    return best, fbest


def _solve(A, b):
    try:
        if np.linalg.cond(A) > 1e12:
            return None
        return np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        return None


def _vertex_distance(x0, V, p: float) -> float:
    """Exact ``min_c |x0 - V^T c|_p`` for ``p`` in {1, inf} by enumerating vertices.

    For ``p = 1`` some minimizer zeroes ``k`` residuals; for ``p = inf`` some
    minimizer has ``k + 1`` residuals of equal modulus.  Every candidate is
    evaluated with the true norm, so the result is an attained value.
    """
    k, n = V.shape
    best = INF
    if p == 1.0:
        for S in itertools.combinations(range(n), k):
            c = _solve(V[:, S].T, x0[list(S)])
            if c is not None:
                best = min(best, float(np.abs(x0 - c @ V).sum()))
    else:
        for S in itertools.combinations(range(n), k + 1):
            for signs in itertools.product((1.0, -1.0), repeat=k):
                sigma = np.array((1.0,) + signs)
                ct = _solve(np.column_stack([V[:, S].T, sigma]), x0[list(S)])
                if ct is not None:
                    best = min(best, float(np.abs(x0 - ct[:k] @ V).max()))
    return best


def _vertex_sphere_max(c, B, p: float) -> float:
    """Exact ``max |<c, z>| / |z|_p`` over ``z = B t`` for ``p`` in {1, inf}.

    The ratio is maximal at a vertex of the section of the unit ball by the
    kernel.  For ``p = 1`` these have minimal support; for ``p = inf`` they
    have ``dim W`` coordinates equal to +-1.
    """
    n, m = B.shape
    best = 0.0
    if p == 1.0:
        for S in itertools.combinations(range(n), m - 1):
            N = null_space(B[list(S)]) if S else KernelBasis.full_space(m)
            if N.dim == 1:
                z = B @ N.vectors[0]
                best = max(best, abs(float(c @ z)) / float(np.abs(z).sum()))
    else:
        for S in itertools.combinations(range(n), m):
            for signs in itertools.product((1.0, -1.0), repeat=m - 1):
                t = _solve(B[list(S)], np.array((1.0,) + signs))
                if t is not None:
                    z = B @ t
                    best = max(best, abs(float(c @ z)) / float(np.abs(z).max()))
    return best


def brute_force_distance(x0, Y, spec: SpaceSpec, cfg: OracleConfig = OracleConfig()) -> float:
    """``min_c norm(spec, x0 - Y^T c)`` by zooming grid search.

    The search box has radius ``2 sqrt(n) norm(x0) / sigma_min(Y)``: any
    minimizer ``y`` has ``norm(y) <= 2 norm(x0)`` and
    ``|y|_2 <= sqrt(n) |y|_inf <= sqrt(n) norm(y)``.
    """
    x0 = spec.check(x0)
    Yb = Y if isinstance(Y, SubspaceBasis) else SubspaceBasis(Y, spec.dim)
    m = Yb.rank
    if m > MAX_ORACLE_DIM:
        raise OracleLimitError(f"subspace dimension {m} exceeds oracle limit {MAX_ORACLE_DIM}")
    if m == 0:
        return norm(spec, x0)
    V = Yb.vectors
    smin = np.linalg.svd(V, compute_uv=False)[-1]
    R = 2.0 * math.sqrt(spec.dim) * norm(spec, x0) / smin
    if R == 0.0:
        return 0.0
    _, val = _zoom_minimize(lambda C: _norms(spec, x0[None, :] - C @ V), np.zeros(m), R, cfg)
    if spec.plain_p in (1.0, INF):
        # grid search can stall on a ridge of a polyhedral norm
        val = min(val, _vertex_distance(x0, V, spec.plain_p))
    return val


def _sphere_directions(k: int, count: int, seed: int) -> np.ndarray:
    """Scrambled Sobol points mapped to the unit sphere of R^k."""
    u = qmc.Sobol(d=k, scramble=True, seed=seed).random(count)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    g = ndtri(u)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def brute_force_sphere_max(c, W: KernelBasis, spec: SpaceSpec, cfg: OracleConfig = OracleConfig()) -> float:
    """``max |<c, z>| / norm(spec, z)`` over ``z in W`` by sampling and zooming.

    Directions ``t`` of the kernel coordinates are sampled; the best one fixes
    a slice ``<a, t> = <a, t_best>`` on which ``norm(spec, B t)`` is convex
    and minimised by zooming grid search.
    """
    c = np.asarray(c, float)
    k = W.dim
    if k > MAX_ORACLE_DIM:
        raise OracleLimitError(f"kernel dimension {k} exceeds oracle limit {MAX_ORACLE_DIM}")
    if k == 0:
        return 0.0
    B = W.columns
    a = B.T @ c
    if k == 1:
        z = B[:, 0]
        return abs(float(c @ z)) / norm(spec, z)
    T = _sphere_directions(k, 4096, cfg.seed)
    Z = T @ B.T
    ratios = np.abs(Z @ c) / _norms(spec, Z)
    i = int(np.argmax(ratios))
    if ratios[i] == 0.0:
        return 0.0
    t_best = T[i] / float(a @ T[i])  # on the slice <a, t> = 1
    q, _ = np.linalg.qr(np.column_stack([a, np.eye(k)]))
    N = q[:, 1:k]
    t0 = a / float(a @ a)
    # slice minimizers satisfy |t|_2 = |B t|_2 <= sqrt(n) norm(B t) <= sqrt(n) norm(B t_best)
    R = math.sqrt(W.ambient_dim) * norm(spec, B @ t_best) + np.linalg.norm(t_best - t0)
    f = lambda S: _norms(spec, (t0[None, :] + S @ N.T) @ B.T)  # noqa: E731
    _, fmin = _zoom_minimize(f, N.T @ (t_best - t0), R, cfg)
    best = max(float(ratios[i]), 1.0 / fmin)
    if spec.plain_p in (1.0, INF):
        best = max(best, _vertex_sphere_max(c, B, spec.plain_p))
    return best


def check_weak_duality(x0, Y, spec: SpaceSpec, cfg: OracleConfig = OracleConfig()) -> bool:
    """``norm(x0 - y) >= |<x0, z>| / norm_*(z)`` for random ``y in Y``, ``z in W``."""
    x0 = spec.check(x0)
    Yb = Y if isinstance(Y, SubspaceBasis) else SubspaceBasis(Y, spec.dim)
    W = Yb.kernel()
    if W.dim == 0:
        return True
    dspec = dual_spec(spec)
    rng = np.random.default_rng(cfg.seed)
    scale = 1.0 + float(np.linalg.norm(x0))
    for _ in range(cfg.trials):
        y = Yb.combine(scale * rng.standard_normal(Yb.rank)) if Yb.rank else np.zeros(spec.dim)
        z = W.columns @ rng.standard_normal(W.dim)
        nz = norm(dspec, z)
        if nz == 0.0:
            continue
        lhs = norm(spec, x0 - y)
        if lhs < abs(float(x0 @ z)) / nz - HOLDER_SLACK * (1.0 + lhs):
            return False
    return True


def sign_aligned(u, v) -> np.ndarray:
    """``b_j = sgn(u_j v_j) v_j`` where ``u_j != 0``, else ``v_j``."""
    u, v = np.asarray(u, float), np.asarray(v, float)
    return np.where(u != 0.0, np.sign(u * v) * v, v)


def holder_check(u, v, p: float, cfg: OracleConfig = OracleConfig()) -> bool:
    """Hölder's inequality for ``(u, v)`` obtained from the mixed-norm inequality.

    With ``b`` the sign-aligned copy of ``v`` and any nonzero ``a`` orthogonal
    to ``b``, the mixed inequality at ``lam = 0`` with every exponent equal to
    ``p`` reads ``|u|_p |b|_q >= <u, b>``; since ``<u, b> = sum |u_j v_j|``
    and ``|b|_q = |v|_q`` this is Hölder's inequality.
    """
    u, v = np.asarray(u, float), np.asarray(v, float)
    if u.shape != v.shape or u.size < 2:
        raise ValueError("u and v need the same length >= 2")
    if not 1.0 < p < INF:
        raise ValueError("p must lie in (1, inf)")
    b = sign_aligned(u, v)
    if not np.any(b):
        raise ValueError("degenerate: b = 0")
    a = null_space(b[None, :]).vectors[0]
    spec = SpaceSpec.plain(p, u.size)
    q = conjugate_exponent(p)
    ok_mixed = mixed_inequality_check(u, a, spec, 0.0, b, cfg, optimality=False)
    lhs = float(np.sum(np.abs(u * v)))
    rhs = norm(spec, u) * norm(SpaceSpec.plain(q, v.size), v)
    reduces = (abs(float(u @ b) - lhs) <= HOLDER_SLACK * (1.0 + lhs)
               and abs(norm(dual_spec(spec), b) - norm(dual_spec(spec), v)) <= HOLDER_SLACK * (1.0 + rhs))
    return bool(ok_mixed and reduces and lhs <= rhs + HOLDER_SLACK * (1.0 + rhs))


@dataclass
class MixedInequality:
    holds: bool
    left: float
    right: float
    gap: float | None = None  # relative gap between optimised sides

    def __bool__(self) -> bool:
        return self.holds


def mixed_inequality(x, a, spec: SpaceSpec, lam: float, b, optimality: bool = True) -> MixedInequality:
    """Both sides of ``norm(x - lam a) * norm_*(b) >= |<x, b>|`` for ``<a, b> = 0``.

    With ``optimality`` the inequality is also closed: ``lam`` is optimised by
    golden-section search and ``b`` over ``W = a^perp`` by the sphere
    maximiser; the relative gap between the two optima is reported.
    """
    x, a, b = spec.check(x), spec.check(a), spec.check(b)
    if not np.any(b):
        raise ValueError("b must be nonzero")
    if abs(float(a @ b)) > 1e-10 * (1.0 + np.linalg.norm(a) * np.linalg.norm(b)):
        raise ValueError("b is not in W = {z : <a, z> = 0}")
    dspec = dual_spec(spec)
    left = norm(spec, x - lam * a) * norm(dspec, b)
    right = abs(float(x @ b))
    holds = left >= right - HOLDER_SLACK * (1.0 + right)
    gap = None
    if optimality:
        na = norm(spec, a)
        L = 2.0 * norm(spec, x) / na if na else 0.0
        _, primal = golden_section(lambda t: norm(spec, x - t * a), -L, L)
        W = null_space(a[None, :])
        dual = sphere_max(x, W, dspec).value if W.dim else 0.0
        gap = (primal - dual) / max(primal, 1e-300) if primal else abs(dual)
        holds = holds and primal >= dual - HOLDER_SLACK * (1.0 + primal)
    return MixedInequality(bool(holds), left, right, gap)


def mixed_inequality_check(x, a, spec: SpaceSpec, lam: float, b, cfg: OracleConfig = OracleConfig(),
                           optimality: bool = True, gap_rtol: float = 1e-5) -> bool:
    """The mixed-norm inequality holds at ``(lam, b)``, and (with
    ``optimality``) optimising both sides closes it to ``gap_rtol``."""
    res = mixed_inequality(x, a, spec, lam, b, optimality)
    if optimality and res.gap is not None and res.gap > gap_rtol:
        return False
    return res.holds
