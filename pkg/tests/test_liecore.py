import math

import numpy as np
import pytest

from einstab.errors import InvariantViolation
from einstab.liecore import (BackgroundForm, aw_basis, aw_generators, build_algebra, nik_basis, so_generator,
                             stiefel_basis, validate_pq)


@pytest.mark.parametrize("family,n,dim,killing", [
    ('su', 2, 3, 4.0),
    ('su', 3, 8, 6.0),
    ('so', 4, 6, 2.0),
    ('so', 5, 10, 3.0),
    ('so', 6, 15, 4.0),
])
def test_build_algebra_self_test(family, n, dim, killing):
    alg = build_algebra(family, n)
    assert alg.dim == dim
    assert alg.killing_scale == killing
    assert alg.self_test()
    assert alg.closure_residual() < 1e-12
    assert alg.jacobi_residual() < 1e-12


@pytest.mark.parametrize("family,n", [('sp', 3), ('su', 1), ('so', 2), ('so', 3.5)])
def test_build_algebra_rejects_bad_input(family, n):
    with pytest.raises(ValueError):
        build_algebra(family, n)


def test_background_form_labels():
    assert BackgroundForm.trace(4.0).label == "-4tr"
    assert BackgroundForm.trace().label == "-tr"
    assert BackgroundForm.negative_killing().label == "-B"
    with pytest.raises(ValueError):
        BackgroundForm.trace(0.0)
    with pytest.raises(ValueError):
        BackgroundForm.negative_killing(-1.0)


def test_killing_form_is_multiple_of_trace_form():
    alg = build_algebra('su', 3)
    x, y = alg.basis[0], alg.basis[3] + alg.basis[0]
    killing = alg.inner(x, y, BackgroundForm.negative_killing())
    trace = alg.inner(x, y, BackgroundForm.trace())
    assert killing == pytest.approx(6.0 * trace)


def test_so_generator_is_antisymmetric():
    e = so_generator(4, 1, 3)
    assert np.allclose(e, -e.T)
    assert e[0, 2] == 1 and e[2, 0] == -1


@pytest.mark.parametrize("p,q", [(0, 1), (1, 4), (1, 5), (2, 7)])
def test_aw_basis_is_orthogonal(p, q):
    basis = aw_basis(p, q)
    assert basis.labels == ['m1', 'm2', 'm3', 'm4']
    assert basis.dims == [2, 1, 2, 2]
    assert basis.check_orthogonal(BackgroundForm.trace(4.0))


def test_aw_generators_normalization():
    gens = aw_generators(1, 4)
    alg = build_algebra('su', 3)
    form = BackgroundForm.trace(4.0)
    assert alg.inner(gens['N'], gens['Z'], form) == pytest.approx(0.0, abs=1e-12)
    assert alg.inner(gens['N'], gens['N'], form) == pytest.approx(alg.inner(gens['Z'], gens['Z'], form))
    with pytest.raises(ValueError):
        aw_generators(0, 0)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 6), (-1, 4), (0, 0), (0, 2)])
def test_validate_pq_rejects(p, q):
    with pytest.raises(ValueError):
        validate_pq(p, q)


def test_validate_pq_accepts_n130():
    validate_pq(1, 3)
    validate_pq(0, 1)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_stiefel_basis(n):
    basis = stiefel_basis(n)
    assert basis.labels == ['p0', 'p1', 'p2']
    assert basis.dims == [1, n - 1, n - 1]
    assert len(basis.isotropy_vectors) == (n - 1) * (n - 2) // 2
    assert basis.check_orthogonal(BackgroundForm.trace(0.5))


def test_stiefel_basis_rejects_small_n():
    with pytest.raises(ValueError):
        stiefel_basis(2)


@pytest.mark.parametrize("angle", [0.0, 0.3, math.pi / 4])
def test_nik_basis_is_orthogonal(angle):
    basis = nik_basis(angle)
    assert basis.labels == ['p1', 'p2', 'p3', 'p4']
    assert basis.dims == [2, 2, 2, 1]
    assert basis.check_orthogonal(BackgroundForm.trace(0.5))


def test_check_orthogonal_detects_overlap():
    basis = stiefel_basis(3)
    basis.blocks['p2'] = basis.blocks['p1']
    with pytest.raises(InvariantViolation):
        basis.check_orthogonal(BackgroundForm.trace(0.5))


@pytest.mark.parametrize("p,q", [(0, 1), (1, 4), (2, 7), (1, -3)])
def test_negative_six_trace_normalizations(p, q):
    form = BackgroundForm.trace(6.0)
    su3 = build_algebra('su', 3)
    gens = aw_generators(p, q)
    for name in ('N', 'Z', 'X1', 'X2', 'X4', 'X5', 'X6', 'X7'):
        assert su3.inner(gens[name], gens[name], form) == pytest.approx(3.0, rel=1e-12)
    assert su3.inner(gens['N'], gens['Z'], form) == pytest.approx(0.0, abs=1e-12)
