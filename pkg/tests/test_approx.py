import numpy as np
import pytest

from bjapprox.approx import (
    best_approximation,
    bj_orthogonal,
    bj_orthogonality,
    distance,
    equal_distance_diagnose,
    golden_section,
    probe_minimizers,
    residual_orthogonality_check,
    restriction_norm_equality,
    uniqueness_certificate,
)
from bjapprox.instances import l1_3_example, l1_4_example, minimization_example, minimization_distance, planar_distance
from bjapprox.linalg import in_span
from bjapprox.space import INF, DimensionError, SpaceSpec, dual_spec, norm

GAP = 1e-7


def check_result(res, x0, Y, spec):
    assert norm(spec, res.residual) == pytest.approx(res.distance, abs=1e-9 * (1 + res.distance))
    assert np.allclose(res.residual, x0 - res.best_approx, atol=1e-12)
    assert in_span(res.best_approx, Y)
    cert = res.certificate
    if not cert.degenerate:
        assert norm(dual_spec(spec), cert.z) == pytest.approx(1.0, abs=1e-9)
        for y in np.atleast_2d(Y):
            assert abs(y @ cert.z) <= 1e-9 * np.linalg.norm(y)
        assert abs(cert.pairing) == pytest.approx(res.distance, abs=abs(res.duality_gap) + 1e-12)
    if res.converged:
        assert abs(res.duality_gap) <= GAP * (1 + res.distance)


def test_distance_l1_4_example():
    inst = l1_4_example()
    value, cert = distance(inst.x0, inst.basis, inst.spec)
    assert value == pytest.approx(2.0, abs=1e-9)
    assert np.max(np.abs(cert.z)) == pytest.approx(1.0)
    assert abs(cert.pairing) == pytest.approx(2.0)


def test_best_approximation_l1_4_example():
    inst = l1_4_example()
    res = best_approximation(inst.x0, inst.basis, inst.spec)
    assert np.allclose(res.best_approx, [0, 1, 1, 0], atol=1e-7)
    assert np.allclose(res.residual, [1, 0, 0, 1], atol=1e-7)
    check_result(res, inst.x0, inst.basis, inst.spec)
    assert residual_orthogonality_check(res, inst.basis, inst.spec)


def test_l1_3_example():
    inst = l1_3_example()
    value, _ = distance(inst.x0, inst.basis, inst.spec)
    assert value == pytest.approx(0.5, abs=1e-9)
    res = best_approximation(inst.x0, inst.basis, inst.spec)
    assert np.allclose(res.best_approx, [0, 0, 0.5], atol=1e-7)
    assert res.unique == "yes"
    check_result(res, inst.x0, inst.basis, inst.spec)
    assert uniqueness_certificate(inst.x0, inst.basis, inst.spec) == "Inconclusive"
    probes = probe_minimizers(inst.x0, inst.basis, inst.spec)
    assert max(np.max(np.abs(p - probes[0])) for p in probes) <= 1e-6


def test_l2_projection():
    spec = SpaceSpec.plain(2, 2)
    res = best_approximation([2.0, 1.0], [[1.0, 1.0]], spec)
    assert np.allclose(res.best_approx, [1.5, 1.5], atol=1e-9)
    assert res.distance == pytest.approx(np.sqrt(2) / 2, rel=1e-12)
    assert res.unique == "yes"


def test_minimization_example_distances(rng):
    for p1 in (1.0, 2.0, 5.0, INF):
        alpha = rng.normal(size=10)
        inst = minimization_example(alpha, p1)
        res = best_approximation(inst.x0, inst.basis, inst.spec)
        assert res.distance == pytest.approx(minimization_distance(alpha), rel=1e-6)
        check_result(res, inst.x0, inst.basis, inst.spec)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, INF])
def test_planar_closed_form(rng, p):
    for _ in range(20):
        a, b, c, d = rng.uniform(-3, 3, size=4)
        value, _ = distance([a, b], [[c, d]], SpaceSpec.plain(p, 2))
        assert value == pytest.approx(planar_distance(a, b, c, d, p), rel=1e-8)


def test_degenerate_inputs():
    spec = SpaceSpec.plain(2, 3)
    res = best_approximation([1.0, 2.0, 0.0], [[1, 0, 0], [0, 1, 0]], spec)
    assert res.distance == 0.0
    assert res.certificate.degenerate
    assert np.allclose(res.best_approx, [1, 2, 0])
    assert any("degenerate" in w for w in res.warnings)
    # Y spans everything
    value, cert = distance([1.0, 2.0], np.eye(2), SpaceSpec.plain(1, 2))
    assert value == 0.0 and cert.degenerate


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        distance([1.0, 2.0], [[1, 0, 0]], SpaceSpec.plain(2, 2))
    with pytest.raises(DimensionError):
        distance([1.0, 2.0, 3.0], [[1, 0]], SpaceSpec.plain(2, 2))


def test_uniqueness_flags(rng):
    x0 = rng.normal(size=4)
    Y = rng.normal(size=(2, 4))
    assert best_approximation(x0, Y, SpaceSpec.plain(3, 4)).unique == "yes"
    assert best_approximation(x0, Y, SpaceSpec(((2, 1.5), (2, 4.0)), 2.0)).unique == "yes"
    # distance 1 from x0 = (1, 1) to span{(0, 1)} in l_inf is attained on a segment
    res = best_approximation([1.0, 1.0], [[0.0, 1.0]], SpaceSpec.plain(INF, 2))
    assert res.unique in ("no", "unknown")


def test_golden_section():
    lam, value = golden_section(lambda t: (t - 0.3) ** 2 + 1, -2, 2)
    assert lam == pytest.approx(0.3, abs=1e-6)
    assert value == pytest.approx(1.0, abs=1e-12)


def test_bj_orthogonal_examples():
    l2 = SpaceSpec.plain(2, 2)
    assert bj_orthogonal([1, 0], [0, 1], l2)
    assert not bj_orthogonal([1, 1], [1, 0], l2)
    res = bj_orthogonality([1, 0, 0, 1], [1, 2, 0, 0], SpaceSpec.plain(1, 4))
    assert res.orthogonal
    assert res.min_value == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(ValueError):
        bj_orthogonal([0, 0], [1, 0], l2)


def test_bj_orthogonality_is_not_symmetric():
    # in l_1, (1, 0) ⊥ (1, 1) but (1, 1) is not ⊥ (1, 0)
    l1 = SpaceSpec.plain(1, 2)
    assert bj_orthogonal([1, 0], [1, 1], l1)
    assert not bj_orthogonal([1, 1], [1, 0], l1)


def test_residual_orthogonality_examples():
    inst = l1_4_example()
    res = best_approximation(inst.x0, inst.basis, inst.spec)
    assert residual_orthogonality_check(res, inst.basis, inst.spec)
    bumped = res.best_approx + 0.1 * inst.basis[0]
    perturbed = type(res)(**{**res.__dict__, "best_approx": bumped, "residual": inst.x0 - bumped})
    assert not residual_orthogonality_check(perturbed, inst.basis, inst.spec)
    empty = best_approximation([1.0, 2.0], np.zeros((0, 2)), SpaceSpec.plain(2, 2))
    assert residual_orthogonality_check(empty, np.zeros((0, 2)), SpaceSpec.plain(2, 2))


def test_restriction_norm_equality_examples():
    inst = l1_4_example()
    assert restriction_norm_equality(inst.x0, [0, 1, 1, 0], inst.basis, inst.spec)
    assert not restriction_norm_equality(inst.x0, [0, 0, 0, 0], inst.basis, inst.spec)
    x0 = np.array([0.0, 2.0, 2.0, 0.0])
    assert restriction_norm_equality(x0, x0, inst.basis, inst.spec)
    with pytest.raises(ValueError):
        restriction_norm_equality(inst.x0, [1, 0, 0, 0], inst.basis, inst.spec)


def test_uniqueness_certificate_examples():
    assert uniqueness_certificate([1.0, 0.0], [[1.0, 2.0]], SpaceSpec.plain(1, 2)) == "Sufficient"
    assert uniqueness_certificate([1.0, 0.0], [[1.0, 1.0]], SpaceSpec.plain(INF, 2)) == "Sufficient"
    inst = l1_3_example()
    assert uniqueness_certificate(inst.x0, inst.basis, inst.spec) == "Inconclusive"
    with pytest.raises(ValueError):
        uniqueness_certificate([1.0, 0.0], [[1.0, 1.0]], SpaceSpec.plain(2, 2))


def test_sufficient_certificate_implies_stable_minimizer(rng):
    seen = 0
    for _ in range(40):
        p = float(rng.choice([1.0, INF]))
        spec = SpaceSpec.plain(p, 3)
        # only a one-dimensional W can avoid non-smooth sphere points
        x0, Y = rng.normal(size=3), rng.normal(size=(2, 3))
        if uniqueness_certificate(x0, Y, spec) != "Sufficient":
            continue
        seen += 1
        probes = probe_minimizers(x0, Y, spec, seeds=range(8))
        assert max(np.max(np.abs(q - probes[0])) for q in probes) <= 1e-6
    assert seen > 0


def test_equal_distance_aligned():
    out = equal_distance_diagnose([1.0, 1.0], [[0.0, 1.0]], 1.5, 3.0)
    assert out.equal
    lam, j = out.witness
    assert lam == pytest.approx(1.0, abs=1e-7) and j == 0
    assert out.distances[0] == pytest.approx(1.0, abs=1e-9)
    for r in out.residuals:
        assert np.allclose(r, [1, 0], atol=1e-7)


def test_equal_distance_generic():
    out = equal_distance_diagnose([1.0, 0.0, 0.0], [[1.0, 1.0, 0.0]], 1.5, 3.0)
    assert not out.equal and out.witness is None
    assert out.distances[0] != pytest.approx(out.distances[1], rel=1e-7)


def test_equal_distance_rejects():
    with pytest.raises(ValueError):
        equal_distance_diagnose([1.0, 1.0], [[0.0, 1.0]], 2.0, 2.0)
    with pytest.raises(ValueError):
        equal_distance_diagnose([1.0, 1.0], [[0.0, 1.0]], 1.0, 2.0)
    with pytest.raises(ValueError):
        equal_distance_diagnose([0.0, 1.0], [[0.0, 1.0]], 1.5, 3.0)


def test_seed_determinism(rng):
    x0, Y = rng.normal(size=5), rng.normal(size=(2, 5))
    spec = SpaceSpec(((2, INF), (3, 1.0)), 1.5)
    a = best_approximation(x0, Y, spec, seed=7)
    b = best_approximation(x0, Y, spec, seed=7)
    assert np.array_equal(a.best_approx, b.best_approx)
    assert a.distance == b.distance
