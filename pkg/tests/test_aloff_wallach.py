import math

import numpy as np
import pytest
import sympy

from einstab.aloff_wallach import (CR, N130, PP, AWMetric, aw_discriminant, aw_F3F4, aw_F_partials,
                                   aw_instability_report, aw_pairs, aw_ricci, branch_interval, c_equation_residual,
                                   cr_forward, cr_solution_family, cr_to_metric, discriminant_identity,
                                   einstein_system_residual, f_poly, f_poly_derivative, kl_to_pq, pq_to_kl,
                                   solve_c, solve_c_all)
from einstab.homspace import StabilityVerdict


@pytest.mark.parametrize("branch", [CR, PP])
def test_solution_family_solves_einstein_system(branch):
    lo, hi = branch_interval(branch)
    for c in np.linspace(lo, hi, 200):
        state = cr_solution_family(c, branch)
        assert np.max(np.abs(einstein_system_residual(state))) <= 1e-12
        assert state.uv_residual <= 1e-12
        assert state.branch == branch


def test_solution_family_rejects_c_outside_branch():
    with pytest.raises(ValueError):
        cr_solution_family(0.0, CR)
    with pytest.raises(ValueError):
        cr_solution_family(-0.95, PP)
    with pytest.raises(ValueError):
        branch_interval('XY')


@pytest.mark.parametrize("branch,scales,einstein_constant", [
    (CR, (1.0, 1.0, 0.5, 0.5), 0.75),
    (PP, (1.0, 1.0, 2.5, 2.5), 0.27),
])
def test_closed_form_metrics_for_n010(branch, scales, einstein_constant):
    c = solve_c(0, 1, branch)
    assert abs(c) == pytest.approx(1.0)
    metric, constant = cr_to_metric(c, branch, 0, 1)
    np.testing.assert_allclose(metric.scales, scales, rtol=1e-10)
    assert constant == pytest.approx(einstein_constant, rel=1e-12)
    np.testing.assert_allclose(aw_ricci(metric), einstein_constant, atol=1e-10)


def test_cr_forward_inverts_solution_family():
    c = solve_c(1, 4, CR)
    metric, constant = cr_to_metric(c, CR, 1, 4)
    state = cr_forward(metric, constant)
    assert state.c == pytest.approx(c, abs=1e-10)
    assert np.max(np.abs(einstein_system_residual(state))) <= 1e-9
    with pytest.raises(ValueError):
        cr_forward(metric, -1.0)


def test_c_equation_root_residual():
    for branch in (CR, PP):
        for c in solve_c_all(1, 5, branch):
            assert abs(c_equation_residual(c, 1, 5, branch)) < 1e-9


@pytest.mark.parametrize("branch", [CR, PP])
def test_n130_root_is_inner_endpoint(branch):
    lo, hi = branch_interval(branch)
    assert solve_c_all(1, 3, branch) == [hi if branch == CR else lo]
    assert abs(solve_c(1, 3, branch)) == pytest.approx(2.0 / math.sqrt(5.0))


def test_kl_pq_conversion():
    assert kl_to_pq(1, 1) == (0, 1)
    assert kl_to_pq(1, 0) == (1, 3)
    assert kl_to_pq(2, 1) == (1, 9)
    assert pq_to_kl(0, 1) == (1, 1)
    assert pq_to_kl(1, 4) == (7, 1)
    with pytest.raises(ValueError):
        kl_to_pq(2, 2)
    with pytest.raises(ValueError):
        kl_to_pq(1, 2)


def test_aw_pairs():
    pairs = aw_pairs(6)
    assert pairs[0] == (0, 1)
    assert (1, 3) in pairs and (1, 4) in pairs and (1, 5) in pairs
    assert (2, 6) not in pairs
    assert all(q >= 3 * p and math.gcd(p, q) == 1 for p, q in pairs)
    with pytest.raises(ValueError):
        aw_pairs(0)


def test_f_polynomial_values_are_exact():
    assert f_poly_derivative(-1) == -35
    assert f_poly_derivative(1) == 77
    assert isinstance(f_poly(sympy.Rational(-17, 20)), sympy.Rational)
    assert f_poly(sympy.Rational(-17, 20)) > 3
    assert f_poly(sympy.Rational(17, 20)) > 1096
    assert f_poly(0) == 168
    assert f_poly(0.5) == pytest.approx(float(f_poly(sympy.Rational(1, 2))))


def test_f_polynomial_is_positive_on_branches():
    for branch in (CR, PP):
        lo, hi = branch_interval(branch)
        for c in np.linspace(lo, hi, 101):
            assert f_poly(float(c)) > 0


@pytest.mark.parametrize("p,q", [(0, 1), (1, 4), (1, 5), (2, 7)])
@pytest.mark.parametrize("branch", [CR, PP])
def test_discriminant_identity(p, q, branch):
    c = solve_c(p, q, branch)
    metric, _ = cr_to_metric(c, branch, p, q)
    assert aw_discriminant(metric) == pytest.approx(discriminant_identity(metric, c), rel=1e-8)
    assert aw_discriminant(metric) > 0


@pytest.mark.parametrize("p,q", aw_pairs(20))
@pytest.mark.parametrize("branch", [CR, PP])
def test_every_aloff_wallach_metric_is_unstable(p, q, branch):
    verdict = aw_instability_report(p, q, branch, include_n130=(p, q) == N130)
    assert verdict.classification == StabilityVerdict.S_UNSTABLE
    assert verdict.second_variation > 0
    assert verdict.direction[:2] == (0.0, 0.0)
    assert verdict.details['max_divergence'] <= 1e-10
    assert verdict.verify()


def test_n130_needs_explicit_request():
    with pytest.raises(ValueError):
        aw_instability_report(1, 3, CR)
    verdict = aw_instability_report(1, 3, CR, include_n130=True)
    assert "Nikonorov" in verdict.note


def test_inadmissible_pairs_are_rejected():
    with pytest.raises(ValueError):
        aw_instability_report(1, 1, CR)
    with pytest.raises(ValueError):
        AWMetric.create(1.0, 1.0, 1.0, 0.0, 0, 1)


def test_first_derivative_polynomials():
    assert aw_F3F4(AWMetric.create(1, 1, 0.5, 0.5, 0, 1)) == pytest.approx((0.0, 0.0), abs=1e-12)
    assert aw_F3F4(AWMetric.create(1, 1, 1, 1, 0, 1)) == pytest.approx((-9.0, -9.0), rel=1e-12)


@pytest.mark.parametrize("p,q", [(0, 1), (1, 4), (1, 5), (2, 7)])
@pytest.mark.parametrize("branch", [CR, PP])
def test_first_derivatives_vanish_at_einstein_metric(p, q, branch):
    verdict = aw_instability_report(p, q, branch)
    metric = AWMetric.create(verdict.details['alpha'], verdict.details['beta'], verdict.details['gamma'],
                             verdict.details['delta'], p, q)
    scale = max(1.0, max(abs(v) for v in aw_F_partials(metric)))
    assert abs(verdict.details['F3']) <= 1e-7 * scale
    assert abs(verdict.details['F4']) <= 1e-7 * scale
