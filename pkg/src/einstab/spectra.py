"""
Module for the spectral side of the instability analysis: root systems and Casimir constants of
irreducible representations, the conformal criterion lambda_1 < 2 Lambda, eigenvalues in the canonical
variation of circle bundles over Hermitian symmetric spaces, and the curated case studies.

All representation-theoretic quantities are exact sympy Rationals. Weights are given in
fundamental-weight (Dynkin) coordinates and the inner product is normalized so that the highest
root has squared length 2 (the normalized form Q').
"""
import itertools
import math
import os
from collections import OrderedDict
from functools import lru_cache
from typing import NamedTuple

import ruamel.yaml as yaml
import sympy
from sympy import Rational

from .errors import InvariantViolation
from .homspace import StabilityVerdict

CURATED_CASES_FILE = os.path.join(os.path.dirname(__file__), 'data', 'curated_cases.yaml')

SERIES = ('A', 'B', 'C', 'D', 'E', 'F', 'G')

CASE_IDS = ('triple-S3', 'hyperquadric', 'E6', 'E7', 'grassmannian', 'sp-su', 'flag-su3')


def _validate_series(series: str, rank: int):
    """
    :raises ValueError: If the series and rank do not name a simple Lie algebra
    """
    if series not in SERIES:
        raise ValueError("unknown series %s, expected one of %s" % (str(series), str(SERIES)))
    if not isinstance(rank, int) or rank < 1:
        raise ValueError("rank must be a positive integer, got %s" % str(rank))
    minimal = {'A': 1, 'B': 2, 'C': 2, 'D': 3}
    fixed = {'E': (6, 7, 8), 'F': (4,), 'G': (2,)}
    if series in minimal and rank < minimal[series]:
        raise ValueError("%s_n requires n >= %i, got %i" % (series, minimal[series], rank))
    if series in fixed and rank not in fixed[series]:
        raise ValueError("%s%i is not a simple Lie algebra" % (series, rank))


def cartan_matrix(series: str, rank: int):
    """
    Cartan matrix whose row i holds the Dynkin labels of the simple root alpha_i.
    B_n has its short root last, C_n its long root last, and in D_n and E_n the last node is attached
    to node n-3 and node 2, respectively.

    :return: sympy Matrix
    """
    _validate_series(series, rank)
    attach = {'D': rank - 3, 'E': 2}.get(series)

    def fill(i, j):
        if i == j:
            return 2
        if series == 'B' and (i, j) == (rank - 2, rank - 1):
            return -2
        if series == 'C' and (i, j) == (rank - 1, rank - 2):
            return -2
        if series == 'F' and (i, j) == (1, 2):
            return -2
        if series == 'G' and (i, j) == (0, 1):
            return -3
        if attach is not None:
            if {i, j} == {rank - 1, rank - 2}:
                return 0
            if {i, j} == {rank - 1, attach}:
                return -1
        return -1 if abs(i - j) == 1 else 0

    return sympy.Matrix(rank, rank, fill)


def _symmetrizer(cartan: sympy.Matrix):
    """Half squared lengths d_i = (alpha_i, alpha_i)/2 of the simple roots, normalized to max(d) = 1"""
    rank = cartan.rows
    d = [None] * rank
    d[0] = Rational(1)
    pending = [0]
    while pending:
        i = pending.pop()
        for j in range(rank):
            if j != i and cartan[i, j] != 0 and d[j] is None:
                d[j] = d[i] * Rational(cartan[j, i], cartan[i, j])
                pending.append(j)
    top = max(d)
    return tuple(v / top for v in d)


def _positive_roots(cartan: sympy.Matrix):
    """
    Positive roots as coefficient tuples in the simple roots, ordered by height.
    beta + alpha_i is a root iff p - <beta, alpha_i^v> > 0, where p is the length of the alpha_i-string below beta.
    """
    rank = cartan.rows
    roots = [tuple(1 if k == i else 0 for k in range(rank)) for i in range(rank)]
    known = set(roots)
    index = 0
    while index < len(roots):
        root = roots[index]
        labels = [sum(root[k] * cartan[k, j] for k in range(rank)) for j in range(rank)]
        for i in range(rank):
            down = 0
            lower = list(root)
            while True:
                lower[i] -= 1
                if tuple(lower) not in known:
                    break
                down += 1
            if down - labels[i] > 0:
                raised = tuple(c + 1 if k == i else c for k, c in enumerate(root))
                if raised not in known:
                    roots.append(raised)
                    known.add(raised)
        index += 1
    return roots


class RootSystem:
    """
    Root data of a simple compact Lie algebra with the inner product on weights normalized so that
    the highest root theta satisfies <theta, theta> = 2
    """

    def __init__(self, series: str, rank: int):
        _validate_series(series, rank)
        self.series = series
        self.rank = rank
        self.cartan = cartan_matrix(series, rank)
        self.symmetrizer = _symmetrizer(self.cartan)
        # <omega_i, omega_j> = (A^{-1} D)_{ij}
        self.weight_gram = self.cartan.inv() * sympy.diag(*self.symmetrizer)
        self.positive_roots = _positive_roots(self.cartan)
        highest = max(self.positive_roots, key=sum)
        self.highest_root = tuple(int(v) for v in (sympy.Matrix([highest]) * self.cartan))
        self.rho = (1,) * rank

    @property
    def name(self):
        return "%s%i" % (self.series, self.rank)

    @property
    def dual_coxeter(self):
        """h^v = <theta, theta + 2 delta> / 2"""
        return self.casimir_prime(self.highest_root) / 2

    @property
    def dimension_of_algebra(self):
        return self.rank + 2 * len(self.positive_roots)

    def check_weight(self, weight):
        """
        :raises ValueError: If the weight is not a dominant integral weight of the right length
        """
        weight = tuple(weight)
        if len(weight) != self.rank:
            raise ValueError("weight %s has %i coordinates, %s needs %i" % (str(weight), len(weight), self.name,
                                                                          self.rank))
        if not all(isinstance(v, int) and v >= 0 for v in weight):
            raise ValueError("weight coordinates must be nonnegative integers, got %s" % str(weight))
        return weight

    def fundamental(self, index: int):
        """The fundamental weight omega_index in Dynkin coordinates"""
        if not 0 <= index < self.rank:
            raise ValueError("fundamental weight index %s out of range for %s" % (str(index), self.name))
        return tuple(1 if i == index else 0 for i in range(self.rank))

    def inner(self, lam, mu):
        """Normalized inner product <lam, mu> of two weights in Dynkin coordinates"""
        return (sympy.Matrix([list(lam)]) * self.weight_gram * sympy.Matrix(list(mu)))[0, 0]

    def casimir_prime(self, weight):
        """<lam, lam + 2 delta>"""
        weight = self.check_weight(weight)
        shifted = tuple(w + 2 * r for w, r in zip(weight, self.rho))
        return Rational(self.inner(weight, shifted))

    def dimension(self, weight):
        """Weyl dimension formula, product of <lam + delta, beta> / <delta, beta> over positive roots beta"""
        weight = self.check_weight(weight)
        result = Rational(1)
        for root in self.positive_roots:
            num = sum(c * (w + 1) * d for c, w, d in zip(root, weight, self.symmetrizer))
            den = sum(c * d for c, d in zip(root, self.symmetrizer))
            result *= Rational(num) / Rational(den)
        if result.q != 1:
            raise InvariantViolation("Weyl dimension of %s is not an integer: %s" % (str(weight), str(result)))
        return int(result)

    def self_test(self):
        """
        :raises InvariantViolation: If the weight inner product is not symmetric positive definite or
            the highest root does not have squared length 2
        """
        if self.weight_gram != self.weight_gram.T:
            raise InvariantViolation("weight inner product of %s is not symmetric" % self.name)
        if not self.weight_gram.is_positive_definite:
            raise InvariantViolation("weight inner product of %s is not positive definite" % self.name)
        if self.inner(self.highest_root, self.highest_root) != 2:
            raise InvariantViolation("highest root of %s does not have squared length 2" % self.name)
        return True


@lru_cache(maxsize=None)
def root_system(series: str, rank: int):
    """Cached RootSystem"""
    return RootSystem(series, rank)


class GroupScale(NamedTuple):
    """Named tuple with a root system and the Killing scale kappa = 2 h^v with Q = kappa Q'"""

    label: str
    """Label of the group, e.g., so(7) or E6"""

    roots: RootSystem
    """Root system with the normalized inner product Q'"""

    kappa: Rational
    """Killing scale kappa with -B = kappa Q'"""

    @staticmethod
    def create(label: str, series: str, rank: int):
        roots = root_system(series, rank)
        return GroupScale(label=label, roots=roots, kappa=2 * roots.dual_coxeter)

    @staticmethod
    def so(n: int):
        """so(n) for n >= 5: B_{(n-1)/2} for odd n, D_{n/2} for even n"""
        if not isinstance(n, int) or n < 5:
            raise ValueError("so(n) requires an integer n >= 5, got %s" % str(n))
        if n % 2:
            return GroupScale.create("so(%i)" % n, 'B', (n - 1) // 2)
        return GroupScale.create("so(%i)" % n, 'D', n // 2)

    @staticmethod
    def su(n: int):
        """su(n) = A_{n-1} for n >= 2"""
        if not isinstance(n, int) or n < 2:
            raise ValueError("su(n) requires an integer n >= 2, got %s" % str(n))
        return GroupScale.create("su(%i)" % n, 'A', n - 1)

    @staticmethod
    def sp(k: int):
        """sp(k) = C_k for k >= 2"""
        if not isinstance(k, int) or k < 2:
            raise ValueError("sp(k) requires an integer k >= 2, got %s" % str(k))
        return GroupScale.create("sp(%i)" % k, 'C', k)

    @staticmethod
    def exceptional(name: str):
        """E6, E7, E8, F4 or G2"""
        if len(name) != 2 or name[0] not in 'EFG' or not name[1].isdigit():
            raise ValueError("unknown exceptional group %s" % str(name))
        return GroupScale.create(name, name[0], int(name[1]))


def casimir(scale: GroupScale, weight):
    """
    Casimir constant of the irreducible representation with the given highest weight

    :return: Tuple (value for Q', value for Q = kappa Q')
    :raises ValueError: If the weight is not dominant integral
    """
    value = scale.roots.casimir_prime(weight)
    return value, value / scale.kappa


def casimir_compare(scale: GroupScale, lam1, lam2):
    """
    Compare the Casimir constants of two weights with lam1 >= lam2 componentwise.

    :return: 1 if Casimir(lam1) > Casimir(lam2), 0 if lam1 == lam2, None if lam1 does not dominate lam2
    :raises InvariantViolation: If a dominated pair violates the monotonicity of Casimir constants
    """
    lam1 = scale.roots.check_weight(lam1)
    lam2 = scale.roots.check_weight(lam2)
    if not all(a >= b for a, b in zip(lam1, lam2)):
        return None
    c1, c2 = casimir(scale, lam1)[0], casimir(scale, lam2)[0]
    if lam1 == lam2:
        return 0
    if not c1 > c2:
        raise InvariantViolation("Casimir of %s is not larger than Casimir of %s in %s" %
                                 (str(lam1), str(lam2), scale.label))
    return 1


def nu_conformal_test(eigenvalue, einstein_constant, coindex: int = 1, note: str = "", details=None):
    """
    Conformal criterion: a Laplace eigenvalue strictly below 2 Lambda makes the Einstein metric nu-unstable.

    :raises ValueError: If Lambda is not positive or the eigenvalue is negative
    """
    if not einstein_constant > 0:
        raise ValueError("the Einstein constant must be positive, got %s" % str(einstein_constant))
    if eigenvalue < 0:
        raise ValueError("Laplace eigenvalues are nonnegative, got %s" % str(eigenvalue))
    return StabilityVerdict.from_eigenvalue(eigenvalue, 2 * einstein_constant, StabilityVerdict.NU_CONFORMAL,
                                            coindex=coindex, note=note, details=details)


def lichnerowicz_test(eigenvalue, threshold, coindex: int = 1, note: str = "", details=None):
    """An eigenvalue of nabla^* nabla - 2 R on TT-tensors strictly below the threshold gives S-linear instability"""
    return StabilityVerdict.from_eigenvalue(eigenvalue, threshold, StabilityVerdict.S_UNSTABLE,
                                            coindex=coindex, note=note, details=details)


def sasaki_parameters(m: int):
    """
    Canonical-variation parameters of the Sasaki Einstein metric on a circle bundle over a
    Hermitian symmetric space of real dimension 2m

    :return: Tuple (t_*^2, Lambda, 2 Lambda) = (2m/(m+1), m/(2m+2), m/(m+1))
    :raises ValueError: If m < 2
    """
    if not isinstance(m, int) or m < 2:
        raise ValueError("m must be an integer >= 2, got %s" % str(m))
    return Rational(2 * m, m + 1), Rational(m, 2 * m + 2), Rational(m, m + 1)


def canonical_eigenvalue(eigenvalue, ell: int, a, m: int):
    """Eigenvalue lambda - (m-1)/(2m) * ell^2 / a of the Laplacian of g_{t_*}"""
    if not a > 0:
        raise ValueError("the fiber constant a must be positive, got %s" % str(a))
    if not isinstance(m, int) or m < 2:
        raise ValueError("m must be an integer >= 2, got %s" % str(m))
    return eigenvalue - Rational(m - 1, 2 * m) * sympy.nsimplify(ell) ** 2 / sympy.nsimplify(a)


class ClassOneSearch(NamedTuple):
    """Result of the bounded search for class 1 representations of SU(2)^3 relative to the diagonal"""

    minimum: Rational
    """Smallest Casimir constant (for the product of normalized forms Q') among nontrivial class 1 weights"""

    weights: tuple
    """Tuples (a, b, c) of su(2) highest weights attaining the minimum"""

    dimension: int
    """Dimension of the corresponding eigenspace"""

    bound: int
    """Largest weight coordinate searched"""


def clebsch_gordan_multiplicity(a: int, b: int, c: int):
    """Multiplicity of the trivial representation in V_a x V_b x V_c restricted to the diagonal SU(2)"""
    return int(c <= a + b and a <= b + c and b <= a + c and (a + b + c) % 2 == 0)


def class_one_search_triple_s3(bound: int = 3):
    """
    Search all nontrivial V_a x V_b x V_c with a, b, c <= bound that contain a diagonal fixed vector.
    Minimality of the result is only asserted within the bound.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1, got %s" % str(bound))
    su2 = GroupScale.su(2)
    found = []
    for weights in itertools.product(range(bound + 1), repeat=3):
        if weights == (0, 0, 0):
            continue
        mult = clebsch_gordan_multiplicity(*weights)
        if not mult:
            continue
        value = sum(casimir(su2, (w,))[0] for w in weights)
        found.append((value, weights, mult * math.prod(w + 1 for w in weights)))
    minimum = min(value for value, _, _ in found)
    minimal = [(weights, dim) for value, weights, dim in found if value == minimum]
    return ClassOneSearch(minimum=minimum, weights=tuple(w for w, _ in minimal),
                          dimension=sum(dim for _, dim in minimal), bound=bound)


class NuReport(NamedTuple):
    """Named tuple with the representation-theoretic certificate of one case study"""

    case_id: str
    parameters: OrderedDict
    group: str
    subgroup: str

    base_dimension: int
    """Real dimension 2m of the base of the circle bundle (None if not a circle bundle)"""

    einstein_constant: Rational
    """Einstein constant of the analyzed metric"""

    fiber_constant: object
    """Length constant a of the U(1) fiber with respect to Q_G, None if not needed"""

    representation: str
    weight: tuple

    casimir_prime: Rational
    """Casimir constant for the normalized form Q'"""

    casimir: Rational
    """Casimir constant for Q = kappa Q'"""

    verdict: StabilityVerdict
    """Verdict with the spectral witness"""

    dimension: int
    """Dimension of the destabilizing subspace"""

    citation: str


@lru_cache(maxsize=None)
def load_curated_cases(filename: str = CURATED_CASES_FILE):
    """
    Load the curated branching table.

    :return: dict with the keys cases, low_dimensional, notes
    """
    yaml_loader = yaml.YAML(typ='safe', pure=True)
    with open(filename, 'r') as f:
        return yaml_loader.load(f)


def _rational(pair):
    return Rational(int(pair[0]), int(pair[1]))


def _sasaki_case(case_id: str, scale: GroupScale, m: int, parameters: OrderedDict, doubled: bool = False,
                 fiber_constant=None):
    entry = load_curated_cases()['cases'][case_id]
    weight = scale.roots.fundamental(entry['fundamental'])
    _, einstein_constant, _ = sasaki_parameters(m)
    q_prime, q_value = casimir(scale, weight)
    multiplicity = entry['trivial_multiplicity'] * (2 if doubled else 1) * (2 if entry['with_conjugate'] else 1)
    dimension = scale.roots.dimension(weight) * multiplicity
    if entry['fiber_action']:
        eigenvalue = canonical_eigenvalue(q_value, entry['fiber_ell'], fiber_constant, m)
    else:
        eigenvalue = q_value
    details = OrderedDict([('kappa', scale.kappa), ('casimir', q_value), ('eigenvalue', eigenvalue)])
    verdict = nu_conformal_test(eigenvalue, einstein_constant, coindex=dimension, note=entry['citation'],
                                details=details)
    return NuReport(case_id=case_id, parameters=parameters, group=scale.label, subgroup=entry['subgroup'],
                    base_dimension=2 * m, einstein_constant=einstein_constant, fiber_constant=fiber_constant,
                    representation=entry['representation'], weight=weight, casimir_prime=q_prime,
                    casimir=q_value, verdict=verdict, dimension=dimension, citation=entry['citation'])


def _hyperquadric(m=None, **kwargs):
    if not isinstance(m, int) or m < 3:
        raise ValueError("the hyperquadric case requires an integer m >= 3, got %s" % str(m))
    return _sasaki_case('hyperquadric', GroupScale.so(m + 2), m, OrderedDict([('m', m)]),
                        fiber_constant=Rational(2 * m))


def _e6(**kwargs):
    m = load_curated_cases()['cases']['E6']['half_base_dimension']
    return _sasaki_case('E6', GroupScale.exceptional('E6'), m, OrderedDict())


def _e7(**kwargs):
    m = load_curated_cases()['cases']['E7']['half_base_dimension']
    return _sasaki_case('E7', GroupScale.exceptional('E7'), m, OrderedDict())


def _grassmannian(p=None, **kwargs):
    if not isinstance(p, int) or p < 2:
        raise ValueError("the Grassmannian case requires an integer p >= 2, got %s" % str(p))
    doubled_at = load_curated_cases()['cases']['grassmannian']['doubled_at']
    return _sasaki_case('grassmannian', GroupScale.su(p + 2), 2 * p, OrderedDict([('p', p)]),
                        doubled=(p == doubled_at))


def _triple_s3(**kwargs):
    entry = load_curated_cases()['cases']['triple-S3']
    einstein_constant = _rational(entry['einstein_constant'])
    search = class_one_search_triple_s3(entry['search_bound'])
    details = OrderedDict([('search_bound', search.bound), ('minimal_weights', search.weights)])
    verdict = nu_conformal_test(search.minimum, einstein_constant, coindex=search.dimension,
                                note=entry['citation'], details=details)
    return NuReport(case_id='triple-S3', parameters=OrderedDict(), group=entry['group'], subgroup=entry['subgroup'],
                    base_dimension=None, einstein_constant=einstein_constant, fiber_constant=None,
                    representation="V_1 x V_1 x V_0 and permutations", weight=search.weights[0],
                    casimir_prime=search.minimum, casimir=search.minimum, verdict=verdict,
                    dimension=search.dimension, citation=entry['citation'])


def _sp_su(k=None, **kwargs):
    if not isinstance(k, int) or k < 4:
        raise ValueError("the Sp(k)/SU(k) case requires an integer k >= 4, got %s" % str(k))
    entry = load_curated_cases()['cases']['sp-su']
    eigenvalue = Rational(-2 * k) - Rational(4, k + 1)
    verdict = lichnerowicz_test(eigenvalue, Rational(entry['threshold']), note=entry['citation'],
                                details=OrderedDict([('k', k)]))
    return NuReport(case_id='sp-su', parameters=OrderedDict([('k', k)]), group="sp(%i)" % k,
                    subgroup="su(%i)" % k, base_dimension=k * k + k, einstein_constant=Rational(k * k + k + 2),
                    fiber_constant=None, representation="", weight=(), casimir_prime=None, casimir=None,
                    verdict=verdict, dimension=1, citation=entry['citation'])


def _flag_su3(**kwargs):
    entry = load_curated_cases()['cases']['flag-su3']
    base = _rational(entry['base_einstein_constant'])
    fiber = _rational(entry['fiber_einstein_constant'])
    details = OrderedDict([('base_einstein_constant', base), ('fiber_einstein_constant', fiber),
                           ('difference', base - 2 * fiber)])
    verdict = StabilityVerdict.from_eigenvalue(base, 2 * fiber, StabilityVerdict.S_UNSTABLE,
                                               note=entry['citation'], details=details)
    return NuReport(case_id='flag-su3', parameters=OrderedDict(), group=entry['group'], subgroup=entry['subgroup'],
                    base_dimension=4, einstein_constant=None, fiber_constant=None, representation="", weight=(),
                    casimir_prime=None, casimir=None, verdict=verdict, dimension=1, citation=entry['citation'])


CASE_STUDIES = OrderedDict([
    ('triple-S3', _triple_s3),
    ('hyperquadric', _hyperquadric),
    ('E6', _e6),
    ('E7', _e7),
    ('grassmannian', _grassmannian),
    ('sp-su', _sp_su),
    ('flag-su3', _flag_su3),
])


def case_study(case_id: str, m: int = None, p: int = None, k: int = None):
    """
    Assemble the certificate of a curated case study.

    :param case_id: One of CASE_IDS
    :param m: Half the base dimension for hyperquadric (m >= 3)
    :param p: Grassmannian parameter (p >= 2)
    :param k: Sp(k)/SU(k) parameter (k >= 4)
    :return: NuReport
    :raises ValueError: If the case or its parameter is out of range
    """
    if case_id not in CASE_STUDIES:
        raise ValueError("unknown case %s, expected one of %s" % (str(case_id), ", ".join(CASE_IDS)))
    return CASE_STUDIES[case_id](m=m, p=p, k=k)


def sasaki_inequalities(mmax: int = 100, pmax: int = 100):
    """
    The strict inequalities Casimir < 2 Lambda behind the conformal instability of the Sasaki Einstein cases,
    recomputed in rational arithmetic. The exceptional rows come from the root systems; the two infinite
    families use the closed forms (m+1)/(2m) and p(p+3)/(p+2)^2, which agree with ``casimir`` on so(m+2)
    and su(p+2).

    :return: List of OrderedDicts with the keys family, parameter, casimir, bound, holds
    """
    rows = []
    for m in range(3, mmax + 1):
        rows.append(OrderedDict([('family', 'hyperquadric'), ('parameter', m), ('casimir', Rational(m + 1, 2 * m)),
                                 ('bound', sasaki_parameters(m)[2])]))
    for case_id in ('E6', 'E7'):
        entry = load_curated_cases()['cases'][case_id]
        scale = GroupScale.exceptional(case_id)
        value = casimir(scale, scale.roots.fundamental(entry['fundamental']))[1]
        m = entry['half_base_dimension']
        rows.append(OrderedDict([('family', case_id), ('parameter', m), ('casimir', value),
                                 ('bound', sasaki_parameters(m)[2])]))
    for p in range(2, pmax + 1):
        rows.append(OrderedDict([('family', 'grassmannian'), ('parameter', p),
                                 ('casimir', Rational(p * (p + 3), (p + 2) ** 2)),
                                 ('bound', sasaki_parameters(2 * p)[2])]))
    for row in rows:
        row['holds'] = bool(row['casimir'] < row['bound'])
    return rows
