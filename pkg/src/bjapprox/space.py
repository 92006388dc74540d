"""Mixed l_p-sum norms, their duals and duality maps.

A :class:`SpaceSpec` describes ``X = (X_1 + ... + X_n)_p`` with
``X_i = l_{p_i}^{m_i}``: the norm of ``x`` is the outer ``l_p`` norm of the
vector of block norms.  Exponents are plain floats, with ``math.inf`` as the
infinite exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

INF = math.inf


class DimensionError(ValueError):
    """A vector does not match the dimension of the space it is used with."""


def parse_exponent(value) -> float:
    """Accept a number or the string ``"inf"``; reject exponents below 1."""
    if isinstance(value, bool):
        raise ValueError(f"exponent must be a number or 'inf', got {value!r}")
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        value = float(value)
    p = float(value)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"exponent must be >= 1 or 'inf', got {value!r}")
    return p


def format_exponent(p: float):
    return "inf" if math.isinf(p) else p


def conjugate_exponent(p: float) -> float:
    """Return q with 1/p + 1/q = 1 (conj(1) = inf, conj(inf) = 1)."""
    p = parse_exponent(p)
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class SpaceSpec:
    blocks: tuple[tuple[int, float], ...]
    outer_p: float = 2.0

    def __post_init__(self):
        blocks = tuple((int(d), parse_exponent(p)) for d, p in self.blocks)
        if not blocks:
            raise ValueError("a space needs at least one block")
        if any(d < 1 for d, _ in blocks):
            raise ValueError("block dimensions must be positive")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "outer_p", parse_exponent(self.outer_p))

    @classmethod
    def plain(cls, p, dim: int) -> "SpaceSpec":
        p = parse_exponent(p)
        return cls(((dim, p),), p)

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceSpec":
        if "blocks" in data:
            blocks = tuple((b["dim"], b["p"]) for b in data["blocks"])
            return cls(blocks, data.get("outer_p", 2.0))
        return cls.plain(data["p"], data["dim"])

    def to_dict(self) -> dict:
        p = self.plain_p
        if p is not None:
            return {"p": format_exponent(p), "dim": self.dim}
        return {
            "outer_p": format_exponent(self.outer_p),
            "blocks": [{"dim": d, "p": format_exponent(q)} for d, q in self.blocks],
        }

    @property
    def dim(self) -> int:
        return sum(d for d, _ in self.blocks)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Block start indices ``s_0 = 0, s_1, ..., s_{n-1}``."""
        out, s = [], 0
        for d, _ in self.blocks:
            out.append(s)
            s += d
        return tuple(out)

    @property
    def plain_p(self) -> float | None:
        """The exponent if this is a plain l_p^n space, else None."""
        ps = {p for _, p in self.blocks}
        if len(ps) != 1:
            return None
        (p,) = ps
        if len(self.blocks) == 1 or self.outer_p == p:
            return p
        return None

    @property
    def exponents(self) -> tuple[float, ...]:
        return (self.outer_p,) + tuple(p for _, p in self.blocks)

    @property
    def is_polyhedral(self) -> bool:
        p = self.plain_p
        return p is not None and (p == 1.0 or math.isinf(p))

    @property
    def is_strictly_convex(self) -> bool:
        """Every exponent that matters lies strictly between 1 and inf."""
        def smooth(p):
            return 1.0 < p < INF
        if len(self.blocks) == 1:
            # dimension-one blocks are isometric to R whatever their exponent
            d, p = self.blocks[0]
            return d == 1 or smooth(p)
        return smooth(self.outer_p) and all(d == 1 or smooth(p) for d, p in self.blocks)

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise DimensionError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        return x


def _lp(v: np.ndarray, p: float) -> float:
    a = np.abs(v)
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    if p == 1.0:
        return float(a.sum())
    m = a.max()
    if m == 0.0:
        return 0.0
    # scale by the max entry to avoid overflow (large p) and underflow (tiny entries)
    a = a / m
    if p == 2.0:
        return float(m * math.sqrt(np.dot(a, a)))
    return float(m * np.sum(a ** p) ** (1.0 / p))


def block_norms(spec: SpaceSpec, x) -> np.ndarray:
    x = spec.check(x)
    return np.array([_lp(x[s:s + d], p) for s, (d, p) in zip(spec.offsets, spec.blocks)])


def norm(spec: SpaceSpec, x) -> float:
    """Outer l_p norm of the vector of block l_{p_i} norms."""
    x = spec.check(x)
    p = spec.plain_p
    if p is not None:
        return _lp(x, p)
    return _lp(block_norms(spec, x), spec.outer_p)


def dual_spec(spec: SpaceSpec) -> SpaceSpec:
    """Same block dimensions with every exponent conjugated."""
    return SpaceSpec(
        tuple((d, conjugate_exponent(p)) for d, p in spec.blocks),
        conjugate_exponent(spec.outer_p),
    )


def duality_map(a, p: float) -> np.ndarray:
    """Support functional of ``a`` in l_p, 1 < p < inf.

    ``c_k = sgn(a_k) |a_k|^(p-1) / ||a||_p^(p-1)``, so that ``||c||_q = 1``
    and ``<c, a> = ||a||_p``.
    """
    p = parse_exponent(p)
    if not 1.0 < p < INF:
        raise ValueError("the duality map is single-valued only for 1 < p < inf")
    a = np.asarray(a, dtype=float)
    r = _lp(a, p)
    if r == 0.0:
        raise ValueError("duality map of the zero vector is undefined")
    if p == 2.0:
        return a / r
    u = a / r
    return np.sign(u) * np.abs(u) ** (p - 1.0)


def norm_gradient(spec: SpaceSpec, x) -> np.ndarray:
    """A (sub)gradient of ``norm(spec, .)`` at ``x``.

    At smooth points this is the unique support functional of ``x``; for
    polyhedral pieces a canonical subgradient is chosen (sign vector, or the
    first maximal coordinate).  Zero blocks contribute zero.
    """
    x = spec.check(x)
    total = norm(spec, x)
    g = np.zeros_like(x)
    if total == 0.0:
        return g
    bn = block_norms(spec, x)
    outer = spec.outer_p
    if math.isinf(outer):
        weights = np.zeros_like(bn)
        weights[int(np.argmax(bn))] = 1.0
    elif outer == 1.0:
        weights = np.ones_like(bn)
    else:
        weights = (bn / total) ** (outer - 1.0)
    for w, s, (d, p), b in zip(weights, spec.offsets, spec.blocks, bn):
        if w == 0.0 or b == 0.0:
            continue
        v = x[s:s + d]
        if math.isinf(p):
            e = np.zeros(d)
            k = int(np.argmax(np.abs(v)))
            e[k] = np.sign(v[k])
            g[s:s + d] = w * e
        elif p == 1.0:
            g[s:s + d] = w * np.sign(v)
        else:
            g[s:s + d] = w * duality_map(v, p)
    return g


class Smoothness(NamedTuple):
    """Verdict of :func:`is_smooth_point`; truthy iff the point is smooth."""

    smooth: bool
    tight: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.smooth


def is_smooth_point(spec: SpaceSpec, z, tol: float = 1e-9) -> Smoothness:
    """Smoothness of a unit vector of plain l_1^n or l_inf^n.

    For l_inf the point is smooth iff exactly one coordinate reaches
    ``|z_i| = 1``; ``tight`` lists those coordinates.  For l_1 it is smooth
    iff no coordinate vanishes; ``tight`` lists the (near-)zero coordinates.
    """
    if not spec.is_polyhedral:
        raise ValueError("smoothness predicate is implemented for plain l_1 and l_inf only")
    z = spec.check(z)
    nz = norm(spec, z)
    if abs(nz - 1.0) > tol:
        raise ValueError(f"point is not on the unit sphere (norm {nz!r})")
    a = np.abs(z)
    if math.isinf(spec.plain_p):
        tight = tuple(int(i) for i in np.flatnonzero(a >= 1.0 - tol))
        return Smoothness(len(tight) == 1, tight)
    tight = tuple(int(i) for i in np.flatnonzero(a <= tol))
    return Smoothness(not tight, tight)
