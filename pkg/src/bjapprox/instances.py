"""Worked examples used by the self-test, the problem files and the tests."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .space import SpaceSpec


@dataclass(frozen=True)
class Instance:
    name: str
    spec: SpaceSpec
    x0: np.ndarray
    basis: np.ndarray


def l1_4_example() -> Instance:
    """``l_1^4``, ``x0 = (1,1,1,1)``: distance 2, one minimizer ``(0,1,1,0)``."""
    return Instance(
        "l1_4_example",
        SpaceSpec.plain(1, 4),
        np.ones(4),
        np.array([[1.0, 2.0, 0.0, 0.0], [-1.0, 0.0, 2.0, 0.0]]),
    )


def l1_3_example() -> Instance:
    """``l_1^3``, ``x = (0, 1/2, 1/2)``: unique minimizer ``(0, 0, 1/2)``."""
    return Instance(
        "l1_3_example",
        SpaceSpec.plain(1, 3),
        np.array([0.0, 0.5, 0.5]),
        np.array([[0.0, 0.0, 1.0]]),
    )


# columns of the 10 x 10 system; y_1, ..., y_10 are the rows here
MINIMIZATION_BASIS = np.array([
    [-9, 1, 1, 3, 6, 8, 0, 7, 9, 12],
    [7, 0, 5, 9, 5, 3, 2, 7, 1, 6.5],
    [9, -4, 3, -4, 7, 8, 8, 1, 9, 13],
    [9, 1, 6, 3, -1, -1, -7, 0, 5, -1.5],
    [8, 3, 4, 8, 6, 0, 3, 5, -3, 2.5],
    [9, 3, -8, 2, 1, 2, 0, 2, 7, 5.5],
    [6, -2, 9, 5, 8, 1, 4, 1, 5, 5.5],
    [7, 6, 7, 9, 8, 3, 2, 1, 3, 4.5],
    [-8, 0, 0, 1, -6, 9, 0, 4, 9, 11],
    [8, 9, 2, 7, 5, 5, 6, 9, 8, 14],
], dtype=float)

MINIMIZATION_KERNEL = np.array([0, 0, 0, 0, 0, 1, 1, 1, 1, -2], dtype=float)


def minimization_spec(p1: float = 2.0) -> SpaceSpec:
    """``l_{p1}^1 ⊕ l_7^2 ⊕ l_3^3 ⊕ l_11^2 ⊕ l_9^2`` under an outer l_5; ``p1`` is free."""
    return SpaceSpec(((1, p1), (2, 7.0), (3, 3.0), (2, 11.0), (2, 9.0)), 5.0)


def minimization_constant() -> float:
    """``K = (1 + 2^(25/22) + (1 + 2^(9/8))^(10/9))^(4/5)``, the dual norm of the kernel vector."""
    return (1.0 + 2.0 ** (25.0 / 22.0) + (1.0 + 2.0 ** (9.0 / 8.0)) ** (10.0 / 9.0)) ** 0.8


def minimization_distance(alpha) -> float:
    a = np.asarray(alpha, float)
    return abs(a[5] + a[6] + a[7] + a[8] - 2.0 * a[9]) / minimization_constant()


def minimization_example(alpha=None, p1: float = 2.0) -> Instance:
    alpha = np.ones(10) if alpha is None else np.asarray(alpha, float)
    return Instance("minimization_example", minimization_spec(p1), alpha, MINIMIZATION_BASIS.copy())


def planar_distance(a: float, b: float, c: float, d: float, p: float) -> float:
    """Distance from ``(a, b)`` to ``span{(c, d)}`` in l_p^2: ``|ad - bc| / |(c, d)|_q``."""
    if p == 1.0:
        q_norm = max(abs(c), abs(d))
    elif math.isinf(p):
        q_norm = abs(c) + abs(d)
    else:
        q = p / (p - 1.0)
        q_norm = (abs(c) ** q + abs(d) ** q) ** (1.0 / q)
    return abs(a * d - b * c) / q_norm


def planar_distance_l1(a: float, b: float, c: float, d: float) -> float:
    """The l_1^2 closed form written without a max: ``2|ad - bc| / (|d| + |c| + ||d| - |c||)``."""
    return 2.0 * abs(a * d - b * c) / (abs(d) + abs(c) + abs(abs(d) - abs(c)))
