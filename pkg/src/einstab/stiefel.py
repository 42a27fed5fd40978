"""
Module for the Stiefel manifolds V_2(R^{n+1}) = SO(n+1)/SO(n-1) with metrics
g = x0 Q'|p0 + x1 Q'|p1 + x2 Q'|p2 and Q' = -1/2 tr
"""
import math
from collections import OrderedDict
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation
from .homspace import (DIVERGENCE_TOL, FD_RTOL, DiagonalMetric, IsotropyData, StabilityVerdict,
                       check_divergence_free, einstein_candidate, fd_second_variation, grad_hess,
                       structure_triples)
from .liecore import BackgroundForm, stiefel_basis

STIEFEL_FORM = BackgroundForm.trace(0.5)

CLOSED_FORM_RTOL = 1e-8

DIVERGENCE_MAX_N = 8
"""Largest n for which the divergence check is run on the matrix model of so(n+1)"""

PRODUCT_NOTE = ("for n = 3 the product metric on S^2 x S^3 is S-linearly unstable as well "
                "(known result, not computed)")


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise ValueError("the Stiefel manifold requires an integer n >= 3, got %s" % str(n))
    return int(n)


class StiefelMetric(NamedTuple):
    """Named tuple with the metric g(x0, x1, x2) on V_2(R^{n+1})"""

    x0: float
    x1: float
    x2: float
    n: int

    @staticmethod
    def create(x0, x1, x2, n):
        """
        :raises ValueError: If a scale is not positive or n < 3
        """
        n = _check_n(n)
        scales = tuple(float(v) for v in (x0, x1, x2))
        if not all(math.isfinite(v) and v > 0 for v in scales):
            raise ValueError("x0, x1, x2 must be positive, got %s" % str(scales))
        return StiefelMetric(*scales, n=n)

    def to_diagonal(self):
        return DiagonalMetric.create((self.x0, self.x1, self.x2))


def stiefel_scalar(m: StiefelMetric):
    """
    s = (n-1) [(n-1)/x1 + (n-1)/x2 + 1/x0] - (n-1)/2 [x1/(x2 x0) + x2/(x1 x0) + x0/(x1 x2)]
    """
    k = m.n - 1
    x0, x1, x2 = m.x0, m.x1, m.x2
    return k * (k / x1 + k / x2 + 1.0 / x0) - 0.5 * k * (x1 / (x2 * x0) + x2 / (x1 * x0) + x0 / (x1 * x2))


@lru_cache(maxsize=None)
def stiefel_isotropy_data(n: int):
    """
    IsotropyData with d = (1, n-1, n-1), b = 2(n-1) and [012] = n-1 on Q' = -1/2 tr.
    ``stiefel_structure_data`` computes the same data from the matrix model.
    """
    k = _check_n(n) - 1
    triples = np.zeros((3, 3, 3))
    for i, j, l in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):  # noqa: E741
        triples[i, j, l] = k
    return IsotropyData.create(dims=(1, k, k), b=(2.0 * k,) * 3, triples=triples, labels=('p0', 'p1', 'p2'))


def stiefel_structure_data(n: int):
    """IsotropyData from the structure constants of the adapted basis of so(n+1)"""
    return structure_triples(stiefel_basis(_check_n(n)), STIEFEL_FORM)


def stiefel_einstein(n: int):
    """
    The invariant Einstein metric (2(n-1), n, n) with Einstein constant (n-1)^2/n^2

    :return: EinsteinCandidate
    """
    n = _check_n(n)
    metric = StiefelMetric.create(2 * (n - 1), n, n, n)
    return einstein_candidate(stiefel_isotropy_data(n), metric.to_diagonal())


def stiefel_closed_form_second_derivative(n: int):
    """
    d^2 S / dx1^2 at (2(n-1), n, n) in closed form,
    V^(1/(2n-1)) (n-1)[(n-3)(2n^2-2n+1)+1] / (2(2n-1)(n-1)n^3) with V = 2(n-1) n^(2n-2)
    """
    n = _check_n(n)
    log_v = math.log(2.0 * (n - 1)) + (2 * n - 2) * math.log(n)
    bracket = (n - 1) * ((n - 3) * (2 * n * n - 2 * n + 1) + 1)
    return math.exp(log_v / (2 * n - 1)) * bracket / (2.0 * (2 * n - 1) * (n - 1) * n ** 3)


def stiefel_instability(n: int):
    """
    Certify the S-linear instability of the Einstein metric along the direction (0, 1, 0).

    :return: StabilityVerdict with the second-variation witness
    :raises InvariantViolation: If the analytic value disagrees with the closed form or the second difference
    """
    n = _check_n(n)
    data = stiefel_isotropy_data(n)
    candidate = stiefel_einstein(n)
    g = candidate.metric
    _, hess = grad_hess(data, g)
    value = float(hess[1, 1])
    closed = stiefel_closed_form_second_derivative(n)
    deviation = abs(value - closed) / abs(closed)
    if deviation > CLOSED_FORM_RTOL:
        raise InvariantViolation("closed-form second derivative for n = %i" % n, deviation, CLOSED_FORM_RTOL)
    direction = (0.0, 1.0, 0.0)
    fd_value = fd_second_variation(data, g, direction)
    fd_deviation = abs(fd_value - value) / abs(value)
    if fd_deviation > FD_RTOL:
        raise InvariantViolation("finite-difference second derivative for n = %i" % n, fd_deviation, FD_RTOL)
    details = OrderedDict([
        ('n', n), ('x0', g.scales[0]), ('x1', g.scales[1]), ('x2', g.scales[2]),
        ('einstein_constant', candidate.einstein_constant),
        ('gradient_norm', candidate.gradient_norm),
        ('bracket', (n - 1) * ((n - 3) * (2 * n * n - 2 * n + 1) + 1)),
        ('closed_form', closed),
        ('second_variation_fd', fd_value),
    ])
    if n <= DIVERGENCE_MAX_N:
        details['max_divergence'] = check_divergence_free(stiefel_basis(n), STIEFEL_FORM, g, direction,
                                                          tol=DIVERGENCE_TOL)
    return StabilityVerdict.from_second_variation(direction, value, coindex=1,
                                                  note=PRODUCT_NOTE if n == 3 else "", details=details)
