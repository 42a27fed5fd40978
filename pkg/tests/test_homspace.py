import math

import numpy as np
import pytest

from einstab import homspace
from einstab.aloff_wallach import AW_FORM, AWMetric, aw_isotropy_data, aw_scalar
from einstab.errors import InvariantViolation
from einstab.homspace import (DiagonalMetric, IsotropyData, NormalizedScalarFunctional, StabilityVerdict,
                              check_divergence_free, einstein_candidate, finite_difference_gradient,
                              finite_difference_hessian, find_einstein, grad_hess, normalized_total_scalar,
                              ricci_blocks, scalar_curvature, second_variation, volume_factor)
from einstab.liecore import aw_basis, nik_basis, stiefel_basis
from einstab.nikonorov import NIK_FORM, NikMetric, nik_isotropy_data, nik_scalar, nik_structure_data
from einstab.stiefel import (STIEFEL_FORM, StiefelMetric, stiefel_isotropy_data, stiefel_scalar,
                             stiefel_structure_data)


def _random_scales(rng, count):
    return rng.uniform(0.3, 3.0, size=count)


def test_isotropy_data_validation():
    with pytest.raises(ValueError):
        IsotropyData.create(dims=(1, 2), b=(1.0,), triples=np.zeros((2, 2, 2)))
    triples = np.zeros((3, 3, 3))
    triples[0, 1, 2] = 1.0
    with pytest.raises(ValueError):
        IsotropyData.create(dims=(1, 1, 1), b=(1.0, 1.0, 1.0), triples=triples)
    with pytest.raises(ValueError):
        IsotropyData.create(dims=(0, 2), b=(1.0, 1.0), triples=np.zeros((2, 2, 2)))


def test_diagonal_metric():
    g = DiagonalMetric.create((1.0, 2.0))
    assert g.scaled(2.0).scales == (2.0, 4.0)
    assert g.normalized(1, 1.0).scales == (0.5, 1.0)
    with pytest.raises(ValueError):
        DiagonalMetric.create((1.0, -1.0))
    with pytest.raises(ValueError):
        DiagonalMetric.create(())


@pytest.mark.parametrize("n", [3, 4, 5])
def test_stiefel_closed_triples_match_structure_constants(n):
    closed = stiefel_isotropy_data(n)
    computed = stiefel_structure_data(n)
    assert computed.dims == closed.dims
    np.testing.assert_allclose(computed.b, closed.b, rtol=1e-12)
    np.testing.assert_allclose(computed.triples, closed.triples, atol=1e-10)


@pytest.mark.parametrize("angle,a", [(math.pi / 4, 1.0), (0.0, 0.0), (0.3, math.sin(0.6) ** 2)])
def test_nik_closed_triples_match_structure_constants(angle, a):
    closed = nik_isotropy_data(a)
    computed = nik_structure_data(angle)
    assert computed.dims == closed.dims
    np.testing.assert_allclose(computed.b, closed.b, rtol=1e-12)
    np.testing.assert_allclose(computed.triples, closed.triples, atol=1e-9)


def test_scalar_curvature_matches_closed_forms():
    rng = np.random.default_rng(7)
    for n in (3, 4, 7):
        data = stiefel_isotropy_data(n)
        for _ in range(100):
            x = _random_scales(rng, 3)
            expected = stiefel_scalar(StiefelMetric.create(*x, n=n))
            assert scalar_curvature(data, DiagonalMetric.create(x)) == pytest.approx(expected, rel=1e-9)
    data = nik_isotropy_data(1.0)
    for _ in range(100):
        x = _random_scales(rng, 4)
        expected = nik_scalar(NikMetric.create(*x, a=1.0))
        assert scalar_curvature(data, DiagonalMetric.create(x)) == pytest.approx(expected, rel=1e-9)
    for p, q in ((0, 1), (1, 4), (2, 7)):
        data = aw_isotropy_data(p, q)
        for _ in range(100):
            m = AWMetric.create(*_random_scales(rng, 4), p=p, q=q)
            assert scalar_curvature(data, m.to_diagonal()) == pytest.approx(aw_scalar(m), rel=1e-9)


def test_scalar_curvature_is_trace_of_ricci():
    rng = np.random.default_rng(11)
    data = aw_isotropy_data(1, 4)
    for _ in range(20):
        g = DiagonalMetric.create(_random_scales(rng, 4))
        trace = float(np.dot(data.dims, ricci_blocks(data, g)))
        assert trace == pytest.approx(scalar_curvature(data, g), rel=1e-10)


def test_normalized_total_scalar_is_scale_invariant():
    data = nik_isotropy_data(0.4)
    g = DiagonalMetric.create((1.3, 0.7, 2.1, 0.9))
    assert normalized_total_scalar(data, g.scaled(3.7)) == pytest.approx(normalized_total_scalar(data, g),
                                                                         rel=1e-12)


def test_volume_factor():
    assert volume_factor(aw_isotropy_data(0, 1), DiagonalMetric.create((1.0, 1.0, 0.5, 0.5))) == \
        pytest.approx(0.25, rel=1e-12)
    for n in (3, 4, 7):
        x = (2.0 * (n - 1), float(n), float(n))
        expected = math.sqrt(x[0]) * x[1] ** ((n - 1) / 2.0) * x[2] ** ((n - 1) / 2.0)
        assert volume_factor(stiefel_isotropy_data(n), DiagonalMetric.create(x)) == pytest.approx(expected,
                                                                                                  rel=1e-12)


def test_normalized_total_scalar_of_stiefel_n3():
    data = stiefel_isotropy_data(3)
    g = DiagonalMetric.create((4.0, 3.0, 3.0))
    assert volume_factor(data, g) == pytest.approx(18.0, rel=1e-12)
    assert scalar_curvature(data, g) == pytest.approx(20.0 / 9.0, rel=1e-12)
    assert normalized_total_scalar(data, g) == pytest.approx(324.0 ** 0.2 * 20.0 / 9.0, rel=1e-12)


def test_normalized_total_scalar_matches_monomial_expansion():
    rng = np.random.default_rng(11)
    for data in (stiefel_isotropy_data(5), nik_isotropy_data(0.3), aw_isotropy_data(1, 4)):
        functional = NormalizedScalarFunctional(data)
        for _ in range(10):
            x = _random_scales(rng, data.r)
            assert normalized_total_scalar(data, DiagonalMetric.create(x)) == \
                pytest.approx(functional.value(x), rel=1e-10)


def test_gradient_and_hessian_match_finite_differences():
    rng = np.random.default_rng(3)
    for data in (stiefel_isotropy_data(4), nik_isotropy_data(1.0), aw_isotropy_data(0, 1)):
        functional = NormalizedScalarFunctional(data)
        for _ in range(5):
            x = _random_scales(rng, data.r)
            grad, hess = grad_hess(data, DiagonalMetric.create(x))
            np.testing.assert_allclose(finite_difference_gradient(functional.value, x), grad,
                                       rtol=1e-5, atol=1e-8)
            np.testing.assert_allclose(finite_difference_hessian(functional.gradient, x), hess,
                                       rtol=1e-5, atol=1e-7)


def test_second_variation_is_quadratic_form():
    data = stiefel_isotropy_data(5)
    g = DiagonalMetric.create((8.0, 5.0, 5.0))
    _, hess = grad_hess(data, g)
    direction = np.array([0.2, -1.0, 0.5])
    assert second_variation(data, g, direction) == pytest.approx(direction @ hess @ direction)


@pytest.mark.parametrize("start", [(5.0, 4.0, 4.0), (1.0, 1.0, 1.0)])
def test_find_einstein_stiefel(start):
    n = 4
    candidate = find_einstein(stiefel_isotropy_data(n), DiagonalMetric.create(start))
    x = candidate.metric.x
    assert x[0] / x[1] == pytest.approx(2.0 * (n - 1) / n, rel=1e-8)
    assert x[1] / x[2] == pytest.approx(1.0, rel=1e-8)
    assert candidate.is_einstein


def test_find_einstein_aloff_wallach_n010():
    candidate = find_einstein(aw_isotropy_data(0, 1), DiagonalMetric.create((1.0, 1.0, 0.6, 0.6)))
    x = candidate.metric.x
    np.testing.assert_allclose(x / x[0], [1.0, 1.0, 0.5, 0.5], rtol=1e-8)
    assert candidate.einstein_constant * x[0] == pytest.approx(0.75, rel=1e-8)
    assert candidate.is_einstein


def test_einstein_candidate_residuals_vanish_at_jensen_metric():
    n = 6
    data = stiefel_isotropy_data(n)
    candidate = einstein_candidate(data, DiagonalMetric.create((2.0 * (n - 1), n, n)))
    assert candidate.max_residual < 1e-12
    assert candidate.einstein_constant == pytest.approx((n - 1) ** 2 / n ** 2, rel=1e-12)


def test_divergence_free_diagonal_directions():
    rng = np.random.default_rng(2024)
    cases = [(aw_basis(0, 1), AW_FORM, 4), (aw_basis(1, 4), AW_FORM, 4), (nik_basis(), NIK_FORM, 4)]
    cases += [(stiefel_basis(n), STIEFEL_FORM, 3) for n in (3, 4, 5)]
    for basis, form, r in cases:
        for _ in range(50):
            g = DiagonalMetric.create(_random_scales(rng, r))
            c = rng.normal(size=r)
            assert check_divergence_free(basis, form, g, c) <= 1e-10


def test_divergence_detects_broken_structure_data(monkeypatch):
    original = homspace._bracket_coefficients

    def skewed(basis, form, vectors):
        coeffs = original(basis, form, vectors).copy()
        coeffs[0, 3, 3] += 0.5
        return coeffs

    monkeypatch.setattr(homspace, '_bracket_coefficients', skewed)
    g = DiagonalMetric.create((1.0, 1.0, 0.5, 0.5))
    assert check_divergence_free(aw_basis(0, 1), AW_FORM, g, g.scales) <= 1e-10
    with pytest.raises(InvariantViolation):
        check_divergence_free(aw_basis(0, 1), AW_FORM, g, (0.0, 0.0, 1.0, -1.0))


def test_verdict_from_eigenvalue():
    verdict = StabilityVerdict.from_eigenvalue(3, 4, StabilityVerdict.NU_CONFORMAL, coindex=2)
    assert verdict.classification == StabilityVerdict.NU_CONFORMAL
    assert verdict.gap == 1
    assert verdict.coindex_lower_bound == 2
    assert verdict.verify()
    equal = StabilityVerdict.from_eigenvalue(4, 4, StabilityVerdict.S_UNSTABLE)
    assert equal.classification == StabilityVerdict.INCONCLUSIVE
    assert equal.coindex_lower_bound == 0
    with pytest.raises(ValueError):
        StabilityVerdict.from_eigenvalue(1, 2, StabilityVerdict.INCONCLUSIVE)


def test_verdict_from_second_variation():
    verdict = StabilityVerdict.from_second_variation((0, 1, 0), 0.25)
    assert verdict.classification == StabilityVerdict.S_UNSTABLE
    assert verdict.direction == (0.0, 1.0, 0.0)
    negative = StabilityVerdict.from_second_variation((0, 1, 0), -0.25)
    assert negative.classification == StabilityVerdict.INCONCLUSIVE


def test_verify_rejects_forged_verdicts():
    with pytest.raises(InvariantViolation):
        StabilityVerdict(classification=StabilityVerdict.S_UNSTABLE, second_variation=-1.0).verify()
    with pytest.raises(InvariantViolation):
        StabilityVerdict(classification=StabilityVerdict.NU_CONFORMAL, eigenvalue=2, threshold=1).verify()
    with pytest.raises(InvariantViolation):
        StabilityVerdict(classification='stable').verify()
