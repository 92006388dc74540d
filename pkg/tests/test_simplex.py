import numpy as np
import pytest

from bjapprox.simplex import Infeasible, Unbounded, linprog_max


def test_basic_lp():
    # max x + y  s.t. x + 2y <= 4, 3x + y <= 6
    x, value, _ = linprog_max([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert value == pytest.approx(2.8)
    assert np.allclose(x, [1.6, 1.2])


def test_equality_constraints():
    # max x0 s.t. x0 + x1 + x2 = 1
    x, value, _ = linprog_max([1, 0, 0], A_eq=[[1, 1, 1]], b_eq=[1])
    assert value == pytest.approx(1.0)
    assert np.allclose(x, [1, 0, 0])


def test_negative_rhs():
    # max -x s.t. -x <= -2  (x >= 2)
    x, value, _ = linprog_max([-1], [[-1]], [-2])
    assert value == pytest.approx(-2.0)


def test_infeasible():
    with pytest.raises(Infeasible):
        linprog_max([1, 0], [[1, 1]], [1], A_eq=[[1, 1]], b_eq=[3])


def test_unbounded():
    with pytest.raises(Unbounded):
        linprog_max([1, 0], [[0, 1]], [1])


def test_tiebreak_on_optimal_face():
    # the whole edge x + y = 1 is optimal; the tie-break picks the end with max y
    x, value, _ = linprog_max([1, 1], [[1, 1]], [1], tiebreak=[np.array([0.0, 1.0])])
    assert value == pytest.approx(1.0)
    assert np.allclose(x, [0, 1])
    x, _, _ = linprog_max([1, 1], [[1, 1]], [1], tiebreak=[np.array([1.0, 0.0])])
    assert np.allclose(x, [1, 0])


def test_degenerate_lp_terminates():
    # a classic cycling example for the largest-coefficient rule
    c = [10, -57, -9, -24]
    A = [[0.5, -5.5, -2.5, 9], [0.5, -1.5, -0.5, 1], [1, 0, 0, 0]]
    b = [0, 0, 1]
    x, value, _ = linprog_max(c, A, b)
    assert value == pytest.approx(1.0)


def test_random_lps_match_vertex_enumeration(rng):
    import itertools

    for _ in range(30):
        A = rng.normal(size=(5, 2))
        A = np.vstack([A, -np.eye(2), np.ones((1, 2))])
        b = np.concatenate([np.abs(rng.normal(size=5)) + 0.1, [0, 0], [3.0]])
        c = rng.normal(size=2)
        best = -np.inf
        for i, j in itertools.combinations(range(len(b)), 2):
            M = A[[i, j]]
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            v = np.linalg.solve(M, b[[i, j]])
            if np.all(A @ v <= b + 1e-9):
                best = max(best, c @ v)
        _, value, _ = linprog_max(c, A[:5].tolist() + [A[-1].tolist()], np.concatenate([b[:5], [3.0]]))
        assert value == pytest.approx(best, abs=1e-9)


def test_crash_basis_matches_phase_one(rng):
    # min |x0 - y c|_1 written with bounds s; c = 0, s = |x0| is a feasible start
    for _ in range(20):
        x0, y = rng.normal(size=4), rng.normal(size=4)
        Yt = y[:, None]
        A = np.block([[-Yt, Yt, -np.eye(4)], [Yt, -Yt, -np.eye(4)]])
        b = np.concatenate([-x0, x0])
        obj = np.concatenate([[0.0, 0.0], -np.ones(4)])
        crash = [(i if x0[i] >= 0 else 4 + i, 2 + i) for i in range(4)]
        _, v1, _ = linprog_max(obj, A, b)
        _, v2, _ = linprog_max(obj, A, b, crash=crash)
        assert v2 == pytest.approx(v1, abs=1e-12)


def test_crash_basis_rejects_infeasible_start():
    from bjapprox.simplex import LPError

    with pytest.raises(LPError):
        linprog_max([1.0], [[1.0], [-1.0]], [1.0, -2.0], crash=[])
