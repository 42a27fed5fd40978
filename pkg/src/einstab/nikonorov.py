"""
Module for the Aloff-Wallach space N^{130} in the reparametrized decomposition p1 + p2 + p3 + p4,
metrics g = x1 Q'|p1 + x2 Q'|p2 + x3 Q'|p3 + x4 Q'|p4 with Q' = -1/2 tr and the parameter
a = sin^2(2 * angle) of the rotation mixing m1 and m4.

For a = 1 the space carries an invariant Einstein metric (unique up to the swap of x1 and x2 and
homothety) that does not occur in the Castellani-Romans and Page-Pope families. For a = 0 the
decomposition is the one of ``aloff_wallach`` with (p, q) = (1, 3).
"""
import math
from collections import OrderedDict
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation
from .homspace import (DIVERGENCE_TOL, FD_RTOL, DiagonalMetric, EinsteinCandidate, IsotropyData,
                       StabilityVerdict, check_divergence_free, einstein_candidate, fd_second_variation,
                       find_einstein, grad_hess, structure_triples)
from .liecore import BackgroundForm, nik_basis

NIK_FORM = BackgroundForm.trace(0.5)

NIK_PUBLISHED_SOLUTION = (5.67352, 1.09220, 5.50695, 5.72906)
"""Published approximation of the a = 1 Einstein metric, normalized by x4 = 5.72906"""

GAUGE_INDEX = 3
MATCH_RTOL = 1e-4
BRACKET_RTOL = 1e-8
SMALL_RATIO = 0.2
"""Instability bound x2/x1 < 1/5 at the first solution"""


class NikMetric(NamedTuple):
    """Named tuple with the metric g(x1, x2, x3, x4) and the parameter a"""

    x1: float
    x2: float
    x3: float
    x4: float
    a: float = 1.0

    @staticmethod
    def create(x1, x2, x3, x4, a=1.0):
        """
        :raises ValueError: If a scale is not positive or a lies outside [0, 1]
        """
        scales = tuple(float(v) for v in (x1, x2, x3, x4))
        if not all(math.isfinite(v) and v > 0 for v in scales):
            raise ValueError("x1, ..., x4 must be positive, got %s" % str(scales))
        if not 0.0 <= a <= 1.0:
            raise ValueError("a must lie in [0, 1], got %s" % str(a))
        return NikMetric(*scales, a=float(a))

    @property
    def scales(self):
        return self.x1, self.x2, self.x3, self.x4

    def to_diagonal(self):
        return DiagonalMetric.create(self.scales)


def angle_to_a(angle: float):
    """a = sin^2(2 angle)"""
    return math.sin(2.0 * angle) ** 2


def nik_scalar(m: NikMetric):
    """Closed-form scalar curvature of g(x1, x2, x3, x4) for the parameter a"""
    x1, x2, x3, x4 = m.scales
    a = m.a
    return (12.0 / x1 + 12.0 / x2 + 12.0 / x3 + 6.0 * a / x4
            - 1.5 * (1.0 - a) * (x4 / x1 ** 2 + x4 / x2 ** 2)
            - 2.0 * (x1 / (x2 * x3) + x2 / (x1 * x3) + x3 / (x1 * x2))
            - 3.0 * a * (x1 / (x2 * x4) + x2 / (x1 * x4) + x4 / (x1 * x2)))


def nik_isotropy_data(a: float = 1.0):
    """
    IsotropyData with d = (2, 2, 2, 1), b = 12, [123] = 4, [114] = [224] = 6(1 - a), [124] = 6a on Q' = -1/2 tr

    :raises ValueError: If a lies outside [0, 1]
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1], got %s" % str(a))
    triples = np.zeros((4, 4, 4))
    for (i, j, k), value in (((0, 1, 2), 4.0), ((0, 0, 3), 6.0 * (1.0 - a)), ((1, 1, 3), 6.0 * (1.0 - a)),
                             ((0, 1, 3), 6.0 * a)):
        for perm in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            triples[perm] = value
    return IsotropyData.create(dims=(2, 2, 2, 1), b=(12.0,) * 4, triples=triples,
                               labels=('p1', 'p2', 'p3', 'p4'))


def nik_structure_data(angle: float = math.pi / 4):
    """IsotropyData from the structure constants of the reparametrized basis of su(3)"""
    return structure_triples(nik_basis(angle), NIK_FORM)


def _gauge(candidate: EinsteinCandidate):
    data = nik_isotropy_data(1.0)
    metric = candidate.metric.normalized(GAUGE_INDEX, NIK_PUBLISHED_SOLUTION[GAUGE_INDEX])
    return einstein_candidate(data, metric, iterations=candidate.iterations)


def nik_solve(starts=None):
    """
    Solve for the two Einstein metrics with a = 1, normalized by x4 = 5.72906.

    :param starts: Optional pair of starting scales. Default is the published solution and its x1-x2 swap
    :return: Tuple with two EinsteinCandidates, the second with x1 and x2 swapped
    :raises SolverError: If the Einstein iteration fails
    :raises InvariantViolation: If a solution does not match the published values
    """
    if starts is None:
        x1, x2, x3, x4 = (5.7, 1.1, 5.5, 5.7)
        starts = ((x1, x2, x3, x4), (x2, x1, x3, x4))
    data = nik_isotropy_data(1.0)
    solutions = tuple(_gauge(find_einstein(data, DiagonalMetric.create(start))) for start in starts)
    expected = np.array(NIK_PUBLISHED_SOLUTION)
    for index, solution in enumerate(solutions):
        target = expected if index == 0 else expected[[1, 0, 2, 3]]
        deviation = float(np.max(np.abs(solution.metric.x - target) / target))
        if deviation > MATCH_RTOL:
            raise InvariantViolation("Einstein metric %i does not match the published values" % (index + 1),
                                     deviation, MATCH_RTOL)
    return solutions


def first_derivative_bracket(x, axis: int = 2):
    """
    Bracket s + 7/2 x_axis ds/dx_axis at a = 1, which vanishes exactly at critical points of the normalized
    total scalar curvature. For axis 2:

    12/x1 - 30/x2 + 12/x3 + 6/x4 + 5 x1/(x2 x3) - 9 x2/(x1 x3) + 5 x3/(x1 x2)
    + 15/2 x1/(x2 x4) - 27/2 x2/(x1 x4) + 15/2 x4/(x1 x2)

    Axis 1 is the same expression with x1 and x2 swapped.
    """
    x1, x2, x3, x4 = (float(v) for v in x)
    if axis == 1:
        x1, x2 = x2, x1
    elif axis != 2:
        raise ValueError("axis must be 1 or 2, got %s" % str(axis))
    return (12.0 / x1 - 30.0 / x2 + 12.0 / x3 + 6.0 / x4
            + 5.0 * x1 / (x2 * x3) - 9.0 * x2 / (x1 * x3) + 5.0 * x3 / (x1 * x2)
            + 7.5 * x1 / (x2 * x4) - 13.5 * x2 / (x1 * x4) + 7.5 * x4 / (x1 * x2))


def instability_bracket(x, axis: int = 2):
    """
    :return: Tuple (r, bracket) with r = x2/x1 and 12 r + (12 - 18 r)(x2/x3) + (6 - 27 r)(x2/x4),
        x1 and x2 swapped for axis 1
    """
    x1, x2, x3, x4 = (float(v) for v in x)
    if axis == 1:
        x1, x2 = x2, x1
    elif axis != 2:
        raise ValueError("axis must be 1 or 2, got %s" % str(axis))
    r = x2 / x1
    return r, 12.0 * r + (12.0 - 18.0 * r) * (x2 / x3) + (6.0 - 27.0 * r) * (x2 / x4)


def nik_instability(solution: EinsteinCandidate, axis: int):
    """
    Certify the S-linear instability of an a = 1 Einstein metric along p_axis.

    At a critical point, d^2 S / dx_axis^2 = V^(2/7) * 2/(7 x_axis^3) * bracket with V = x1 x2 x3 x4^(1/2),
    see ``instability_bracket``, and the bracket is positive whenever x_axis / x_other < 1/5.

    :param solution: EinsteinCandidate from ``nik_solve``
    :param axis: 2 for the first solution, 1 for the second
    :return: StabilityVerdict with the second-variation witness
    :raises InvariantViolation: If a cross-check fails
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2, got %s" % str(axis))
    data = nik_isotropy_data(1.0)
    g = solution.metric
    x = g.x
    _, hess = grad_hess(data, g)
    value = float(hess[axis - 1, axis - 1])

    ratio, bracket = instability_bracket(x, axis)
    volume = x[0] * x[1] * x[2] * math.sqrt(x[3])
    closed = volume ** (2.0 / 7.0) * 2.0 / (7.0 * x[axis - 1] ** 3) * bracket
    deviation = abs(closed - value) / abs(value)
    if deviation > BRACKET_RTOL:
        raise InvariantViolation("bracket form of the second derivative", deviation, BRACKET_RTOL)
    if not ratio < SMALL_RATIO or not bracket > 0:
        raise InvariantViolation("ratio %.6g must be below 1/5 with a positive bracket %.6g" % (ratio, bracket))

    direction = tuple(1.0 if i == axis - 1 else 0.0 for i in range(4))
    fd_value = fd_second_variation(data, g, direction)
    fd_deviation = abs(fd_value - value) / abs(value)
    if fd_deviation > FD_RTOL:
        raise InvariantViolation("finite-difference second derivative", fd_deviation, FD_RTOL)
    divergence = check_divergence_free(nik_basis(), NIK_FORM, g, direction, tol=DIVERGENCE_TOL)

    details = OrderedDict([
        ('axis', axis),
        ('x1', float(x[0])), ('x2', float(x[1])), ('x3', float(x[2])), ('x4', float(x[3])),
        ('einstein_constant', solution.einstein_constant),
        ('gradient_norm', solution.gradient_norm),
        ('first_derivative_bracket', first_derivative_bracket(x, axis)),
        ('ratio', ratio),
        ('bracket', bracket),
        ('second_variation_fd', fd_value),
        ('max_divergence', divergence),
    ])
    return StabilityVerdict.from_second_variation(direction, value, coindex=1, details=details)
