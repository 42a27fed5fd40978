import math

import numpy as np
import pytest

from einstab.homspace import DiagonalMetric, StabilityVerdict, scalar_curvature
from einstab.nikonorov import (NIK_PUBLISHED_SOLUTION, NikMetric, angle_to_a, first_derivative_bracket,
                               instability_bracket, nik_instability, nik_isotropy_data, nik_scalar, nik_solve)


@pytest.fixture(scope='module')
def solutions():
    return nik_solve()


def test_solutions_match_published_values(solutions):
    first, second = solutions
    np.testing.assert_allclose(first.metric.x, NIK_PUBLISHED_SOLUTION, rtol=1e-4)
    swapped = np.array(NIK_PUBLISHED_SOLUTION)[[1, 0, 2, 3]]
    np.testing.assert_allclose(second.metric.x, swapped, rtol=1e-4)
    assert first.is_einstein and second.is_einstein
    assert first.einstein_constant == pytest.approx(second.einstein_constant, rel=1e-10)


def test_solver_reaches_published_values_from_generic_start():
    first, second = nik_solve(starts=((1.0, 0.3, 1.0, 1.0), (0.3, 1.0, 1.0, 1.0)))
    np.testing.assert_allclose(first.metric.x, NIK_PUBLISHED_SOLUTION, rtol=1e-4)
    assert first.iterations > 0
    assert second.metric.x[0] < second.metric.x[1]


def test_first_derivative_bracket_vanishes(solutions):
    first, second = solutions
    assert first_derivative_bracket(first.metric.x, axis=2) == pytest.approx(0.0, abs=1e-8)
    assert first_derivative_bracket(first.metric.x, axis=1) == pytest.approx(0.0, abs=1e-8)
    assert first_derivative_bracket(second.metric.x, axis=1) == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("index,axis", [(0, 2), (1, 1)])
def test_instability_along_small_summand(solutions, index, axis):
    solution = solutions[index]
    ratio, bracket = instability_bracket(solution.metric.x, axis)
    assert ratio < 0.2
    assert bracket > 0
    verdict = nik_instability(solution, axis)
    assert verdict.classification == StabilityVerdict.S_UNSTABLE
    assert verdict.second_variation > 0
    assert verdict.second_variation == pytest.approx(verdict.details['second_variation_fd'], rel=1e-5)
    assert verdict.details['max_divergence'] <= 1e-10
    assert verdict.verify()


@pytest.mark.parametrize("a", [0.0, 0.35, 1.0])
def test_closed_form_scalar_curvature(a):
    rng = np.random.default_rng(5)
    data = nik_isotropy_data(a)
    for _ in range(100):
        x = rng.uniform(0.3, 3.0, size=4)
        expected = nik_scalar(NikMetric.create(*x, a=a))
        assert scalar_curvature(data, DiagonalMetric.create(x)) == pytest.approx(expected, rel=1e-9)


def test_angle_to_a():
    assert angle_to_a(math.pi / 4) == pytest.approx(1.0)
    assert angle_to_a(0.0) == 0.0


def test_invalid_input(solutions):
    with pytest.raises(ValueError):
        NikMetric.create(1, 1, 1, 1, a=1.5)
    with pytest.raises(ValueError):
        NikMetric.create(1, -1, 1, 1)
    with pytest.raises(ValueError):
        nik_isotropy_data(-0.1)
    with pytest.raises(ValueError):
        nik_instability(solutions[0], 3)
    with pytest.raises(ValueError):
        instability_bracket(solutions[0].metric.x, 0)
