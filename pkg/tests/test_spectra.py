import math

import numpy as np
import pytest
from sympy import Rational

from einstab.errors import InvariantViolation
from einstab.homspace import StabilityVerdict
from einstab.spectra import (CASE_IDS, GroupScale, RootSystem, canonical_eigenvalue, cartan_matrix, casimir,
                             casimir_compare, case_study, class_one_search_triple_s3, clebsch_gordan_multiplicity,
                             lichnerowicz_test, load_curated_cases, nu_conformal_test, root_system,
                             sasaki_inequalities, sasaki_parameters)

DUAL_COXETER = [('A', n, n + 1) for n in (1, 2, 3, 4)]
DUAL_COXETER += [('B', n, 2 * n - 1) for n in (2, 3, 4)]
DUAL_COXETER += [('C', n, n + 1) for n in (2, 3, 4)]
DUAL_COXETER += [('D', n, 2 * n - 2) for n in (3, 4, 5)]
DUAL_COXETER += [('E', 6, 12), ('E', 7, 18), ('E', 8, 30), ('F', 4, 9), ('G', 2, 4)]


@pytest.mark.parametrize("series,rank,hvee", DUAL_COXETER)
def test_dual_coxeter_and_adjoint_casimir(series, rank, hvee):
    roots = root_system(series, rank)
    assert roots.self_test()
    assert roots.dual_coxeter == hvee
    scale = GroupScale.create(roots.name, series, rank)
    assert scale.kappa == 2 * hvee
    assert casimir(scale, roots.highest_root)[1] == 1
    assert roots.dimension(roots.highest_root) == roots.dimension_of_algebra


@pytest.mark.parametrize("series,rank,dim", [('A', 2, 8), ('B', 3, 21), ('C', 3, 21), ('D', 4, 28), ('E', 6, 78),
                                             ('E', 7, 133), ('E', 8, 248), ('F', 4, 52), ('G', 2, 14)])
def test_algebra_dimensions(series, rank, dim):
    assert root_system(series, rank).dimension_of_algebra == dim


def test_cartan_matrix_conventions():
    assert cartan_matrix('B', 3)[1, 2] == -2
    assert cartan_matrix('C', 3)[2, 1] == -2
    assert cartan_matrix('G', 2)[0, 1] == -3
    assert cartan_matrix('D', 4)[3, 2] == 0 and cartan_matrix('D', 4)[3, 1] == -1
    assert cartan_matrix('E', 6)[5, 2] == -1 and cartan_matrix('E', 6)[5, 4] == 0


@pytest.mark.parametrize("series,rank", [('X', 2), ('E', 5), ('F', 3), ('G', 3), ('B', 1), ('D', 2), ('A', 0)])
def test_invalid_root_systems(series, rank):
    with pytest.raises(ValueError):
        RootSystem(series, rank)


def test_su2_casimir():
    su2 = GroupScale.su(2)
    assert su2.roots.inner((1,), (1,)) == Rational(1, 2)
    for a in range(6):
        assert casimir(su2, (a,))[0] == Rational(a * (a + 2), 2)
        assert su2.roots.dimension((a,)) == a + 1


def test_vector_representation_of_so5():
    so5 = GroupScale.so(5)
    assert so5.roots.name == 'B2'
    assert casimir(so5, (1, 0)) == (4, Rational(2, 3))
    assert so5.roots.dimension((1, 0)) == 5
    assert so5.roots.dimension((0, 1)) == 4


@pytest.mark.parametrize("m", range(3, 9))
def test_vector_representation_of_so(m):
    scale = GroupScale.so(m + 2)
    vector = scale.roots.fundamental(0)
    assert scale.roots.dimension(vector) == m + 2
    assert casimir(scale, vector)[1] == Rational(m + 1, 2 * m)


def test_exceptional_casimirs():
    e6 = GroupScale.exceptional('E6')
    assert e6.roots.dimension((1, 0, 0, 0, 0, 0)) == 27
    assert casimir(e6, (1, 0, 0, 0, 0, 0)) == (Rational(52, 3), Rational(13, 18))
    e7 = GroupScale.exceptional('E7')
    weight = e7.roots.fundamental(5)
    assert e7.roots.dimension(weight) == 56
    assert casimir(e7, weight) == (Rational(57, 2), Rational(57, 72))
    with pytest.raises(ValueError):
        GroupScale.exceptional('H3')


@pytest.mark.parametrize("p", range(2, 11))
def test_exterior_square_of_su(p):
    scale = GroupScale.su(p + 2)
    weight = scale.roots.fundamental(1)
    assert scale.roots.dimension(weight) == math.comb(p + 2, 2)
    assert casimir(scale, weight)[1] == Rational(p * (p + 3), (p + 2) ** 2)


def test_casimir_rejects_invalid_weights():
    su3 = GroupScale.su(3)
    with pytest.raises(ValueError):
        casimir(su3, (1, -1))
    with pytest.raises(ValueError):
        casimir(su3, (1, 0, 0))
    with pytest.raises(ValueError):
        su3.roots.fundamental(2)
    with pytest.raises(ValueError):
        GroupScale.so(4)


def test_casimir_compare():
    su3 = GroupScale.su(3)
    assert casimir_compare(su3, (2, 1), (1, 1)) == 1
    assert casimir_compare(su3, (1, 1), (1, 1)) == 0
    assert casimir_compare(su3, (1, 0), (0, 1)) is None


def test_sasaki_parameters():
    assert sasaki_parameters(3) == (Rational(3, 2), Rational(3, 8), Rational(3, 4))
    with pytest.raises(ValueError):
        sasaki_parameters(1)


def test_canonical_eigenvalue():
    assert canonical_eigenvalue(Rational(2, 3), 1, 6, 3) == Rational(11, 18)
    with pytest.raises(ValueError):
        canonical_eigenvalue(1, 1, 0, 3)


def test_nu_conformal_test():
    verdict = nu_conformal_test(Rational(11, 18), Rational(3, 8), coindex=10)
    assert verdict.classification == StabilityVerdict.NU_CONFORMAL
    assert verdict.threshold == Rational(3, 4)
    assert verdict.coindex_lower_bound == 10
    assert nu_conformal_test(1, Rational(1, 2)).classification == StabilityVerdict.INCONCLUSIVE
    with pytest.raises(ValueError):
        nu_conformal_test(1, 0)
    with pytest.raises(ValueError):
        nu_conformal_test(-1, 1)


def test_lichnerowicz_test():
    assert lichnerowicz_test(-9, -8).classification == StabilityVerdict.S_UNSTABLE
    assert lichnerowicz_test(-8, -8).classification == StabilityVerdict.INCONCLUSIVE


def test_clebsch_gordan_multiplicity():
    assert clebsch_gordan_multiplicity(1, 1, 0) == 1
    assert clebsch_gordan_multiplicity(1, 1, 1) == 0
    assert clebsch_gordan_multiplicity(3, 1, 1) == 0
    assert clebsch_gordan_multiplicity(2, 1, 1) == 1


def test_class_one_search():
    search = class_one_search_triple_s3(3)
    assert search.minimum == 3
    assert sorted(search.weights) == [(0, 1, 1), (1, 0, 1), (1, 1, 0)]
    assert search.dimension == 12
    with pytest.raises(ValueError):
        class_one_search_triple_s3(0)


def test_triple_s3_case():
    report = case_study('triple-S3')
    assert report.verdict.eigenvalue == 3
    assert report.verdict.threshold == Rational(10, 3)
    assert report.verdict.classification == StabilityVerdict.NU_CONFORMAL
    assert report.dimension == 12


@pytest.mark.parametrize("m", [3, 4, 5, 8])
def test_hyperquadric_case(m):
    report = case_study('hyperquadric', m=m)
    expected = Rational(m + 1, 2 * m) - Rational(m - 1, 2 * m) * Rational(1, 2 * m)
    assert report.verdict.eigenvalue == expected
    assert report.verdict.threshold == Rational(m, m + 1)
    assert report.verdict.classification == StabilityVerdict.NU_CONFORMAL
    assert report.dimension == 2 * (m + 2)
    assert report.base_dimension == 2 * m


def test_hyperquadric_eigenvalue_for_m3():
    assert case_study('hyperquadric', m=3).verdict.eigenvalue == Rational(11, 18)


@pytest.mark.parametrize("case_id,casimir_value,bound,dimension", [
    ('E6', Rational(13, 18), Rational(16, 17), 54),
    ('E7', Rational(57, 72), Rational(27, 28), 112),
])
def test_exceptional_cases(case_id, casimir_value, bound, dimension):
    report = case_study(case_id)
    assert report.casimir == casimir_value
    assert report.verdict.eigenvalue == casimir_value
    assert report.verdict.threshold == bound
    assert report.verdict.classification == StabilityVerdict.NU_CONFORMAL
    assert report.dimension == dimension


@pytest.mark.parametrize("p,dimension", [(2, 12), (3, 10), (4, 15)])
def test_grassmannian_case(p, dimension):
    report = case_study('grassmannian', p=p)
    assert report.verdict.eigenvalue == Rational(p * (p + 3), (p + 2) ** 2)
    assert report.verdict.threshold == Rational(2 * p, 2 * p + 1)
    assert report.verdict.classification == StabilityVerdict.NU_CONFORMAL
    assert report.dimension == dimension


@pytest.mark.parametrize("k", range(4, 21))
def test_sp_su_case(k):
    report = case_study('sp-su', k=k)
    assert report.verdict.eigenvalue == -2 * k - Rational(4, k + 1)
    assert report.verdict.eigenvalue < -8
    assert report.verdict.classification == StabilityVerdict.S_UNSTABLE


def test_flag_case():
    report = case_study('flag-su3')
    assert report.verdict.classification == StabilityVerdict.S_UNSTABLE
    assert report.verdict.gap == Rational(1, 6)


@pytest.mark.parametrize("case_id,kwargs", [('hyperquadric', {'m': 2}), ('grassmannian', {'p': 1}),
                                            ('sp-su', {'k': 3}), ('hyperquadric', {}), ('nope', {})])
def test_case_parameters_are_validated(case_id, kwargs):
    with pytest.raises(ValueError):
        case_study(case_id, **kwargs)


def test_every_case_verifies():
    for case_id in CASE_IDS:
        report = case_study(case_id, m=3, p=2, k=4)
        assert report.verdict.verify()
        assert report.citation


def test_sasaki_inequalities():
    rows = sasaki_inequalities()
    assert len(rows) == 98 + 2 + 99
    assert all(row['holds'] for row in rows)
    assert {row['family'] for row in rows} == {'hyperquadric', 'E6', 'E7', 'grassmannian'}


def test_sasaki_inequality_closed_forms_agree_with_casimir():
    rows = sasaki_inequalities(mmax=7, pmax=5)
    for row in rows:
        if row['family'] == 'hyperquadric':
            scale = GroupScale.so(row['parameter'] + 2)
            assert casimir(scale, scale.roots.fundamental(0))[1] == row['casimir']
        elif row['family'] == 'grassmannian':
            scale = GroupScale.su(row['parameter'] + 2)
            assert casimir(scale, scale.roots.fundamental(1))[1] == row['casimir']
    exceptional = {row['family']: row for row in rows if row['family'] in ('E6', 'E7')}
    assert exceptional['E6']['casimir'] == Rational(13, 18)
    assert exceptional['E6']['bound'] == Rational(16, 17)
    assert exceptional['E7']['casimir'] == Rational(57, 72)
    assert exceptional['E6']['parameter'] == 16 and exceptional['E7']['parameter'] == 27


def test_curated_low_dimensional_table():
    table = load_curated_cases()['low_dimensional']
    seven = [row for row in table if row['dimension'] == 7]
    assert [row['label'] for row in seven] == ["(%i)" % i for i in range(1, 7)]
    assert seven[-1]['verdict'] == 'open'
    assert 'Sp(2)/SU(2)' in seven[-1]['case']


def test_forged_monotonicity_is_detected(monkeypatch):
    su3 = GroupScale.su(3)
    monkeypatch.setattr(RootSystem, 'casimir_prime', lambda self, weight: Rational(1))
    with pytest.raises(InvariantViolation):
        casimir_compare(su3, (2, 1), (1, 1))


@pytest.mark.parametrize("scale", [GroupScale.su(3), GroupScale.so(5), GroupScale.so(8)], ids=['A2', 'B2', 'D4'])
def test_casimir_increases_on_dominated_pairs(scale):
    rng = np.random.default_rng(42)
    rank = scale.roots.rank
    for _ in range(500):
        lam2 = tuple(int(v) for v in rng.integers(0, 4, size=rank))
        step = rng.integers(0, 3, size=rank)
        if not step.any():
            step[rng.integers(0, rank)] = 1
        lam1 = tuple(a + int(b) for a, b in zip(lam2, step))
        assert casimir_compare(scale, lam1, lam2) == 1
        assert casimir(scale, lam1)[0] > casimir(scale, lam2)[0]
