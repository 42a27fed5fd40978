"""
Module for the Aloff-Wallach spaces N^{pq0} = SU(3)/U(1): closed-form Ricci blocks, the invariant
Einstein metrics of the Castellani-Romans (CR) and Page-Pope (PP) families, and the certificate of
S-linear instability along the summands m3 + m4.

Metrics are written as g = alpha Q|m1 + beta Q|m2 + gamma Q|m3 + delta Q|m4 with Q = -4 tr and
(p, q) weighted so that the Ricci blocks take the classical closed form. On the structure-constant
side the m2 coordinate is (3p^2 + q^2) * beta, see ``AWMetric.oracle_scales``.
"""
import math
import warnings
from collections import OrderedDict
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import sympy

from .errors import InvariantViolation, SolverError
from .homspace import (DIVERGENCE_TOL, FD_RTOL, DiagonalMetric, IsotropyData, StabilityVerdict,
                       certify_einstein, check_divergence_free, einstein_candidate, fd_second_variation,
                       second_variation, structure_triples)
from .liecore import BackgroundForm, aw_basis, validate_pq

CR = 'CR'
"""Castellani-Romans branch, d = +sqrt(1 - c^2)"""

PP = 'PP'
"""Page-Pope branch, d = -sqrt(1 - c^2)"""

BRANCHES = (CR, PP)

AW_FORM = BackgroundForm.trace(4.0)
"""Background form Q = -4 tr under which the Ricci blocks take their closed form"""

C_GRID_STEP = 1e-3
BISECTION_TOL = 1e-12
RESIDUAL_TOL = 1e-12
MAX_BISECTION_ITERATIONS = 200
ROOT_DEDUP_TOL = 1e-9
EINSTEIN_RESIDUAL_TOL = 1e-10
IDENTITY_RTOL = 1e-8
NEGATIVE_CLIP = 1e-12
"""Squares u^2, v^2 in [-NEGATIVE_CLIP, 0) are rounding noise and are clipped to zero"""

N130 = (1, 3)
N130_NOTE = ("N^{130} also carries the Einstein metric found by Nikonorov in the reparametrized "
             "decomposition, see the nikonorov case")


def branch_interval(branch: str):
    """
    :return: Tuple (lo, hi) of the admissible c-interval of the branch
    :raises ValueError: If branch is not CR or PP
    """
    if branch == CR:
        return -1.0, -2.0 / math.sqrt(5.0)
    if branch == PP:
        return 2.0 / math.sqrt(5.0), 1.0
    raise ValueError("branch must be one of %s, got %s" % (str(BRANCHES), str(branch)))


class AWMetric(NamedTuple):
    """Named tuple with an invariant metric g(alpha, beta, gamma, delta) on N^{pq0}"""

    alpha: float
    """Scale on m1 = span{X1, X2}"""

    beta: float
    """Scale on m2 = span{Z}"""

    gamma: float
    """Scale on m3 = span{X4, X5}"""

    delta: float
    """Scale on m4 = span{X6, X7}"""

    p: int
    q: int

    @staticmethod
    def create(alpha, beta, gamma, delta, p, q):
        """
        :raises ValueError: If a scale is not positive or (p, q) is not admissible
        """
        validate_pq(p, q)
        scales = tuple(float(v) for v in (alpha, beta, gamma, delta))
        if not all(math.isfinite(v) and v > 0 for v in scales):
            raise ValueError("alpha, beta, gamma, delta must be positive, got %s" % str(scales))
        return AWMetric(*scales, p=int(p), q=int(q))

    @property
    def weight(self):
        """3 p^2 + q^2"""
        return 3 * self.p * self.p + self.q * self.q

    @property
    def scales(self):
        return self.alpha, self.beta, self.gamma, self.delta

    @property
    def oracle_scales(self):
        """Scales in the structure-constant coordinates of ``aw_isotropy_data``"""
        return self.alpha, self.weight * self.beta, self.gamma, self.delta

    def to_diagonal(self):
        """The metric as a DiagonalMetric over ``aw_isotropy_data(p, q)``"""
        return DiagonalMetric.create(self.oracle_scales)


class CRState(NamedTuple):
    """Named tuple with the Castellani-Romans variables of an Aloff-Wallach metric"""

    a: float
    """delta / alpha"""

    b: float
    """gamma / alpha"""

    u: float
    v: float

    lam: float
    """lambda = 96 gamma delta e^2 / alpha with Einstein constant 12 e^2"""

    c: float
    """Solution-family parameter, lambda = 3/2 (c + 2)^2"""

    d_sign: int
    """Sign of d = a - b; +1 on the CR branch, -1 on the PP branch, 0 at c = +-1"""

    @property
    def branch(self):
        return CR if self.c < 0 else PP

    @property
    def uv_residual(self):
        """|u v - (-2 + 5/2 c^2)|"""
        return abs(self.u * self.v - (-2.0 + 2.5 * self.c * self.c))


def kl_to_pq(k: int, l: int):  # noqa: E741
    """
    Convert the slopes (k, l) of N_{k,l} to the coprime pair (p, q) with p = (k - l) t, q = 3 (k + l) t.

    :raises ValueError: If (k, l) is not a coprime pair with k >= l >= 0
    """
    if not isinstance(k, (int, np.integer)) or not isinstance(l, (int, np.integer)):
        raise ValueError("k and l must be integers, got k=%s, l=%s" % (str(k), str(l)))
    if l < 0 or k < l or k == 0:
        raise ValueError("k and l must satisfy k >= l >= 0, (k, l) != (0, 0), got k=%i, l=%i" % (k, l))
    if math.gcd(int(k), int(l)) != 1:
        raise ValueError("k and l must be coprime, got k=%i, l=%i" % (k, l))
    p, q = int(k - l), int(3 * (k + l))
    g = math.gcd(p, q)
    return p // g, q // g


def pq_to_kl(p: int, q: int):
    """Inverse of ``kl_to_pq``"""
    validate_pq(p, q)
    k, l = 3 * p + q, q - 3 * p  # noqa: E741
    g = math.gcd(k, l)
    return k // g, l // g


def aw_pairs(qmax: int):
    """All admissible (p, q) with q <= qmax, ordered by q and then p"""
    if qmax < 1:
        raise ValueError("qmax must be at least 1, got %s" % str(qmax))
    return [(p, q) for q in range(1, qmax + 1) for p in range(0, q // 3 + 1) if math.gcd(p, q) == 1]


def aw_ricci(m: AWMetric):
    """
    Closed-form Ricci coefficients r1, ..., r4 with Ric = r_i g on m_i

    :return: numpy array [r1, r2, r3, r4]
    """
    al, be, ga, de = m.scales
    p, q = m.p, m.q
    qq, plus, minus = q * q * be, (3 * p + q) ** 2 * be, (3 * p - q) ** 2 * be
    r1 = 0.75 / al + (al / (ga * de) - ga / (al * de) - de / (al * ga)) / 8.0 - qq / (4.0 * al * al)
    r2 = qq / (4.0 * al * al) + plus / (16.0 * ga * ga) + minus / (16.0 * de * de)
    r3 = 0.75 / ga + (ga / (al * de) - al / (ga * de) - de / (al * ga)) / 8.0 - plus / (16.0 * ga * ga)
    r4 = 0.75 / de + (de / (al * ga) - al / (ga * de) - ga / (al * de)) / 8.0 - minus / (16.0 * de * de)
    return np.array([r1, r2, r3, r4])


def aw_scalar(m: AWMetric):
    """Closed-form scalar curvature, equal to 2 r1 + r2 + 2 r3 + 2 r4"""
    al, be, ga, de = m.scales
    p, q = m.p, m.q
    return (1.5 * (1.0 / al + 1.0 / ga + 1.0 / de)
            - 0.25 * (al / (ga * de) + ga / (al * de) + de / (al * ga))
            - 0.25 * q * q * be / (al * al)
            - (3 * p + q) ** 2 * be / (16.0 * ga * ga)
            - (3 * p - q) ** 2 * be / (16.0 * de * de))


def aw_ricci_residual(m: AWMetric, einstein_constant: float):
    """Largest |r_i - Lambda| over the four blocks"""
    return float(np.max(np.abs(aw_ricci(m) - einstein_constant)))


@lru_cache(maxsize=None)
def aw_isotropy_data(p: int, q: int):
    """
    IsotropyData of N^{pq0} computed from the structure constants of the adapted basis on Q = -4 tr
    """
    return structure_triples(aw_basis(p, q), AW_FORM)


def cr_forward(m: AWMetric, einstein_constant: float):
    """
    Castellani-Romans variables of a metric with Einstein constant Lambda = 12 e^2

    :raises ValueError: If the Einstein constant is not positive
    """
    if not einstein_constant > 0:
        raise ValueError("the Einstein constant must be positive, got %s" % str(einstein_constant))
    al, be, ga, de = m.scales
    e2 = einstein_constant / 12.0
    lam = 96.0 * ga * de * e2 / al
    a, b = de / al, ga / al
    u = math.sqrt(be * de / (al * ga)) * (3 * m.p + m.q) / math.sqrt(2.0)
    v = -math.sqrt(be * ga / (al * de)) * (3 * m.p - m.q) / math.sqrt(2.0)
    c = math.sqrt(2.0 * lam / 3.0) - 2.0
    return CRState(a=a, b=b, u=u, v=v, lam=lam, c=c, d_sign=int(np.sign(round(a - b, 12))))


def _clipped_square(value: float, name: str, c: float):
    if value < -NEGATIVE_CLIP:
        raise ValueError("%s = %.3e is negative at c = %.15g" % (name, value, c))
    return max(value, 0.0)


def cr_solution_family(c: float, branch: str):
    """
    Explicit solution of the Castellani-Romans system:
    a = c + d/2 + 3/2, b = c - d/2 + 3/2, u^2 = 5/2 - 2 (c + d/2)^2, v^2 = 5/2 - 2 (c - d/2)^2,
    u v = -2 + 5/2 c^2, lambda = 3/2 (c + 2)^2 with d = +-sqrt(1 - c^2).

    The signs are u = +sqrt(u^2) and v = u v / u (v = +sqrt(v^2) if u = 0).

    :param c: Family parameter in the branch interval
    :param branch: CR or PP
    :raises ValueError: If c lies outside the branch interval or u^2, v^2 are negative
    """
    lo, hi = branch_interval(branch)
    c = float(c)
    if not lo - 1e-14 <= c <= hi + 1e-14:
        raise ValueError("c = %.15g is outside the %s interval [%.15g, %.15g]" % (c, branch, lo, hi))
    c = min(max(c, lo), hi)
    d = math.sqrt(max(1.0 - c * c, 0.0))
    if branch == PP:
        d = -d
    u2 = _clipped_square(2.5 - 2.0 * (c + d / 2.0) ** 2, 'u^2', c)
    v2 = _clipped_square(2.5 - 2.0 * (c - d / 2.0) ** 2, 'v^2', c)
    uv = -2.0 + 2.5 * c * c
    u = math.sqrt(u2)
    v = uv / u if u > 0 else math.sqrt(v2)
    return CRState(a=c + d / 2.0 + 1.5, b=c - d / 2.0 + 1.5, u=u, v=v, lam=1.5 * (c + 2.0) ** 2, c=c,
                   d_sign=int(np.sign(d)))


def einstein_system_residual(state: CRState):
    """
    Residuals of the Einstein equations in Castellani-Romans variables:

    6ab + 1 - a^2 - b^2 - (av + bu)^2 = lambda,
    6a + b^2 - a^2 - 1 - u^2 = lambda,
    6b + a^2 - b^2 - 1 - v^2 = lambda,
    (av + bu)^2 + u^2 + v^2 = lambda.

    They are the blocks m1, m3, m4, m2 of the Ricci tensor multiplied by 8ab.

    :return: numpy array with the four residuals
    """
    a, b, u, v, lam = state.a, state.b, state.u, state.v, state.lam
    mixed = (a * v + b * u) ** 2
    return np.array([
        6.0 * a * b + 1.0 - a * a - b * b - mixed - lam,
        6.0 * a + b * b - a * a - 1.0 - u * u - lam,
        6.0 * b + a * a - b * b - 1.0 - v * v - lam,
        mixed + u * u + v * v - lam,
    ])


def c_equation_residual(c: float, p: int, q: int, branch: str):
    """R(c) = 3p/q - (1 - rho)/(1 + rho) with rho = a v / (b u) on the solution family"""
    state = cr_solution_family(c, branch)
    rho = state.a * state.v / (state.b * state.u)
    return 3.0 * p / q - (1.0 - rho) / (1.0 + rho)


def _c_grid(branch: str, step: float = C_GRID_STEP):
    lo, hi = branch_interval(branch)
    count = int(math.ceil((hi - lo) / step)) + 1
    return np.linspace(lo, hi, count)


def _bisect(func, lo: float, hi: float, f_lo: float, tol: float = BISECTION_TOL,
            max_iterations: int = MAX_BISECTION_ITERATIONS):
    """Bisection on a sign-change bracket [lo, hi]"""
    mid, f_mid = lo, f_lo
    for iteration in range(1, max_iterations + 1):
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if abs(f_mid) <= RESIDUAL_TOL and hi - lo <= tol:
            return mid
        if mid <= lo or mid >= hi:
            break
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    if abs(f_mid) <= 100 * RESIDUAL_TOL:
        warnings.warn("bisection stopped at machine precision with residual %.2e" % abs(f_mid))
        return mid
    raise SolverError("bisection did not converge (residual %.3e)" % abs(f_mid), last_iterate=mid,
                      iterations=max_iterations)


def solve_c_all(p: int, q: int, branch: str, step: float = C_GRID_STEP):
    """
    All roots of the c-equation on the branch interval: grid points with |R| <= RESIDUAL_TOL and one
    bisection root per sign change between grid points, deduplicated within ROOT_DEDUP_TOL.

    :return: Sorted list of roots
    :raises ValueError: If (p, q) or branch is not admissible
    :raises SolverError: If no root is found
    """
    validate_pq(p, q)
    lo, hi = branch_interval(branch)
    if 3 * p == q:
        # v = 0 exactly at the inner endpoint
        return [hi if branch == CR else lo]
    grid = _c_grid(branch, step)
    values = np.array([c_equation_residual(c, p, q, branch) for c in grid])
    near_zero = np.abs(values) <= RESIDUAL_TOL
    roots = [float(c) for c in grid[near_zero]]
    for i in range(len(grid) - 1):
        if near_zero[i] or near_zero[i + 1]:
            continue
        if (values[i] < 0) != (values[i + 1] < 0):
            roots.append(_bisect(lambda c: c_equation_residual(c, p, q, branch),
                                 float(grid[i]), float(grid[i + 1]), float(values[i])))
    roots.sort()
    unique = []
    for root in roots:
        if not unique or root - unique[-1] > ROOT_DEDUP_TOL:
            unique.append(root)
    if not unique:
        best = int(np.argmin(np.abs(values)))
        raise SolverError("the c-equation for (p, q) = (%i, %i) has no root on the %s interval" % (p, q, branch),
                          last_iterate=float(grid[best]), iterations=0)
    if len(unique) > 1:
        warnings.warn("the c-equation for (p, q) = (%i, %i) has %i roots on the %s interval" %
                      (p, q, len(unique), branch))
    return unique


def solve_c(p: int, q: int, branch: str):
    """The first root of the c-equation on the branch interval, see ``solve_c_all``"""
    return solve_c_all(p, q, branch)[0]


def cr_to_metric(c: float, branch: str, p: int, q: int):
    """
    Reconstruct the Einstein metric of a solution c with the gauge alpha = 1:
    delta = a, gamma = b, beta = 2 u^2 gamma / ((3p + q)^2 delta), Lambda = lambda / (8 gamma delta).

    :return: Tuple (AWMetric, Lambda)
    :raises InvariantViolation: If the closed-form Ricci blocks deviate from Lambda by more than 1e-10
    """
    validate_pq(p, q)
    state = cr_solution_family(c, branch)
    alpha, delta, gamma = 1.0, state.a, state.b
    beta = 2.0 * state.u ** 2 * gamma / ((3 * p + q) ** 2 * delta)
    if p == 0:
        other = (state.a * state.v + state.b * state.u) ** 2 * alpha ** 3 / (2.0 * gamma * delta * q * q)
        if abs(other - beta) > EINSTEIN_RESIDUAL_TOL * max(1.0, beta):
            raise InvariantViolation("beta reconstructions disagree for (0, %i)" % q, abs(other - beta),
                                     EINSTEIN_RESIDUAL_TOL)
    metric = AWMetric.create(alpha, beta, gamma, delta, p, q)
    einstein_constant = state.lam * alpha / (8.0 * gamma * delta)
    residual = aw_ricci_residual(metric, einstein_constant)
    if residual > EINSTEIN_RESIDUAL_TOL:
        raise InvariantViolation("reconstructed metric for c = %.15g is not Einstein" % c, residual,
                                 EINSTEIN_RESIDUAL_TOL)
    return metric, einstein_constant


@lru_cache(maxsize=None)
def _f_functions():
    """Lambdified F3, F4 and their partials in gamma and delta, as functions of (alpha, beta, gamma, delta, p, q)"""
    al, be, ga, de, p, q = sympy.symbols('alpha beta gamma delta p q')
    f3 = (-60 * al**3 * ga * de**3 + 24 * (al**2 * de**3 + al**3 * de**2) * ga**2 + 10 * al**4 * ga * de**2
          - 18 * al**2 * ga**3 * de**2 + 10 * al**2 * ga * de**4 - 4 * q**2 * al * be * ga**2 * de**3
          + 6 * (3 * p + q)**2 * al**3 * be * de**3 - (3 * p - q)**2 * al**3 * be * ga**2 * de)
    f4 = (-60 * al**3 * ga**3 * de + 24 * (al**2 * ga**3 + al**3 * ga**2) * de**2 + 10 * al**4 * ga**2 * de
          + 10 * al**2 * ga**4 * de - 18 * al**2 * ga**2 * de**3 - 4 * q**2 * al * be * ga**3 * de**2
          - (3 * p + q)**2 * al**3 * be * ga * de**2 + 6 * (3 * p - q)**2 * al**3 * be * ga**3)
    exprs = [f3, f4, sympy.diff(f3, ga), sympy.diff(f3, de), sympy.diff(f4, ga), sympy.diff(f4, de)]
    return sympy.lambdify((al, be, ga, de, p, q), exprs, modules='math')


def aw_F3F4(m: AWMetric):
    """
    The octic polynomials F3, F4 with dS/dgamma and dS/ddelta proportional to F3 and F4

    :return: Tuple (F3, F4)
    """
    values = _f_functions()(*m.scales, m.p, m.q)
    return float(values[0]), float(values[1])


def aw_F_partials(m: AWMetric):
    """
    :return: Tuple (dF3/dgamma, dF3/ddelta, dF4/dgamma, dF4/ddelta)
    """
    values = _f_functions()(*m.scales, m.p, m.q)
    return tuple(float(v) for v in values[2:])


def aw_quadratic_form(m: AWMetric):
    """Symmetric 2x2 matrix of Q(A, B) = A^2 dF3/dgamma + A B (dF3/ddelta + dF4/dgamma) + B^2 dF4/ddelta"""
    f3g, f3d, f4g, f4d = aw_F_partials(m)
    off = 0.5 * (f3d + f4g)
    return np.array([[f3g, off], [off, f4d]])


def aw_discriminant(m: AWMetric):
    """D = (dF3/ddelta + dF4/dgamma)^2 - 4 (dF3/dgamma)(dF4/ddelta)"""
    f3g, f3d, f4g, f4d = aw_F_partials(m)
    return (f3d + f4g) ** 2 - 4.0 * f3g * f4d


_C = sympy.Symbol('c')
F_POLYNOMIAL = sympy.Poly(-392 * _C**4 - 273 * _C**3 + 812 * _C**2 + 840 * _C + 168, _C)
"""f(c) = -392 c^4 - 273 c^3 + 812 c^2 + 840 c + 168"""


def _is_exact(c):
    return isinstance(c, (int, np.integer, Fraction, sympy.Rational)) and not isinstance(c, bool)


def _evaluate(poly: sympy.Poly, c):
    if _is_exact(c):
        if isinstance(c, Fraction):
            c = sympy.Rational(c.numerator, c.denominator)
        elif isinstance(c, (int, np.integer)):
            c = sympy.Integer(int(c))
        return sympy.Rational(poly.eval(c))
    return float(poly.eval(float(c)))


def f_poly(c):
    """f(c), exact as a sympy Rational for int, Fraction, or Rational input and float otherwise"""
    return _evaluate(F_POLYNOMIAL, c)


def f_poly_derivative(c):
    """f'(c), exact for rational input"""
    return _evaluate(F_POLYNOMIAL.diff(_C), c)


def discriminant_identity(m: AWMetric, c: float):
    """Right-hand side 32 alpha^8 gamma^2 delta^2 f(c) of the discriminant identity"""
    return 32.0 * m.alpha ** 8 * m.gamma ** 2 * m.delta ** 2 * float(f_poly(float(c)))


def f_second_variation(m: AWMetric, direction):
    """
    Second variation of the normalized total scalar curvature along (A, B) on m3 + m4 at an Einstein
    metric, from the partials of F3 and F4
    """
    a_coef, b_coef = (float(v) for v in direction)
    vec = np.array([a_coef, b_coef])
    prefactor = (m.weight ** (1.0 / 7.0) * (m.alpha * math.sqrt(m.beta) * m.gamma * m.delta) ** (2.0 / 7.0)
                 / (56.0 * m.alpha ** 3 * m.gamma ** 3 * m.delta ** 3))
    return prefactor * float(vec @ aw_quadratic_form(m) @ vec)


def _check_relative(label: str, value: float, reference: float, rtol: float):
    deviation = abs(value - reference) / max(abs(reference), 1e-300)
    if deviation > rtol:
        raise InvariantViolation("%s: %.17g differs from %.17g" % (label, value, reference), deviation, rtol)
    return deviation


def aw_instability_report(p: int, q: int, branch: str, include_n130: bool = False, c: float = None):
    """
    Certify the S-linear instability of the Einstein metric of N^{pq0} on the given branch.

    The destabilizing direction (A, B) on m3 + m4 is the top eigenvector of the quadratic form in the
    partials of F3 and F4. The analytic second variation is checked against the F-form, a second
    difference, and the direction is checked to be divergence-free.

    :param p: Integer p >= 0
    :param q: Integer q >= 3p, coprime to p
    :param branch: CR or PP
    :param include_n130: Run the closed-form route also for (p, q) = (1, 3)
    :param c: Root of the c-equation to use. Default is the first root found by ``solve_c``
    :return: StabilityVerdict with the second-variation witness
    :raises ValueError: If (p, q) = (1, 3) and include_n130 is False
    :raises InvariantViolation: If any cross-check fails
    """
    validate_pq(p, q)
    note = ""
    if (p, q) == N130:
        if not include_n130:
            raise ValueError("(p, q) = (1, 3) is handled by the nikonorov case; pass include_n130=True")
        note = N130_NOTE
    branch_interval(branch)
    if c is None:
        c = solve_c(p, q, branch)
    metric, einstein_constant = cr_to_metric(c, branch, p, q)
    data = aw_isotropy_data(p, q)
    g = metric.to_diagonal()
    certify_einstein(einstein_candidate(data, g), tol=EINSTEIN_RESIDUAL_TOL, label="N^{%i%i0} %s metric" %
                     (p, q, branch))

    # dS/dgamma and dS/ddelta vanish at the Einstein metric
    f3, f4 = aw_F3F4(metric)
    disc = aw_discriminant(metric)
    rhs = discriminant_identity(metric, c)
    _check_relative("discriminant identity", disc, rhs, IDENTITY_RTOL)

    eigenvalues, eigenvectors = np.linalg.eigh(aw_quadratic_form(metric))
    a_coef, b_coef = eigenvectors[:, -1]
    if a_coef < 0 or (a_coef == 0 and b_coef < 0):
        a_coef, b_coef = -a_coef, -b_coef
    direction = (0.0, 0.0, float(a_coef), float(b_coef))

    value = second_variation(data, g, direction)
    _check_relative("F-form second variation", f_second_variation(metric, (a_coef, b_coef)), value,
                    IDENTITY_RTOL)
    fd_value = fd_second_variation(data, g, direction)
    _check_relative("finite-difference second variation", fd_value, value, FD_RTOL)
    divergence = check_divergence_free(aw_basis(p, q), AW_FORM, g, direction, tol=DIVERGENCE_TOL)

    details = OrderedDict([
        ('p', p), ('q', q), ('branch', branch), ('c', float(c)),
        ('alpha', metric.alpha), ('beta', metric.beta), ('gamma', metric.gamma), ('delta', metric.delta),
        ('einstein_constant', float(einstein_constant)),
        ('einstein_residual', aw_ricci_residual(metric, einstein_constant)),
        ('F3', f3), ('F4', f4),
        ('discriminant', float(disc)),
        ('f(c)', float(f_poly(float(c)))),
        ('discriminant_identity', float(rhs)),
        ('form_eigenvalue', float(eigenvalues[-1])),
        ('second_variation_fd', float(fd_value)),
        ('max_divergence', float(divergence)),
    ])
    if eigenvalues[-1] <= 0:
        return StabilityVerdict(classification=StabilityVerdict.INCONCLUSIVE, direction=direction,
                                second_variation=float(value), note="quadratic form is not indefinite",
                                details=details)
    return StabilityVerdict.from_second_variation(direction, value, coindex=1, note=note, details=details)
