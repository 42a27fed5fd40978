"""
Module for diagonal invariant metrics on reductive homogeneous spaces G/H.

A metric is diagonal with respect to a decomposition m = m_1 + ... + m_r of the complement of
the isotropy algebra into pairwise inequivalent summands and is given by one positive scale per
summand. All geometric quantities are computed from the summand dimensions d_i, the constants
b_i with -B = b_i * Q on m_i, and the structure-constant triples [ijk]. The convention
Vol(Q) = 1 is used throughout.
"""
import math
import warnings
from collections import OrderedDict
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation, SolverError
from .liecore import AdaptedBasis, BackgroundForm

EINSTEIN_TOL = 1e-8
"""Tolerance on block residuals and gradient norm for flagging a metric as Einstein"""

DIVERGENCE_TOL = 1e-10
"""Tolerance for the divergence-free check of diagonal invariant directions"""

FD_RTOL = 1e-5
"""Relative tolerance for comparisons against finite differences"""

FD_STEP = 1e-5
"""Relative step of the central finite differences of first derivatives"""

MAX_NEWTON_ITERATIONS = 200


class IsotropyData(NamedTuple):
    """
    Named tuple with the bracket data of a decomposition m = m_1 + ... + m_r that determines
    the curvature of all diagonal metrics.
    """

    dims: tuple
    """Dimensions d_i of the summands"""

    b: tuple
    """Constants b_i with -B = b_i * Q on the summand m_i, where Q is the background form"""

    triples: np.ndarray
    """Array T of shape (r, r, r) with the structure-constant triples [ijk]"""

    labels: tuple = None
    """Labels of the summands"""

    @property
    def r(self):
        """Number of summands"""
        return len(self.dims)

    @property
    def n(self):
        """Dimension of the homogeneous space"""
        return int(sum(self.dims))

    @staticmethod
    def create(dims, b, triples, labels=None, tol: float = 1e-10):
        """
        Validate the inputs and create the IsotropyData.

        :param dims: Sequence of positive integers
        :param b: Sequence of Killing constants, one per summand
        :param triples: Array-like of shape (r, r, r)
        :param labels: Optional labels of the summands. Default m1, ..., mr
        :param tol: Tolerance for the symmetry and nonnegativity checks
        :raises ValueError: If shapes mismatch, T is not symmetric or has negative entries, or n < 2
        """
        dims = tuple(int(d) for d in dims)
        b = tuple(float(v) for v in b)
        triples = np.array(triples, dtype=float)
        r = len(dims)
        if r == 0 or len(b) != r or triples.shape != (r, r, r):
            raise ValueError("inconsistent shapes: %i dims, %i b values, triples of shape %s" %
                             (r, len(b), str(triples.shape)))
        if any(d <= 0 for d in dims):
            raise ValueError("summand dimensions must be positive, got %s" % str(dims))
        if sum(dims) < 2:
            raise ValueError("the homogeneous space must have dimension >= 2")
        if np.min(triples) < -tol:
            raise ValueError("structure-constant triples must be nonnegative, min is %g" % np.min(triples))
        for perm in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            asym = np.max(np.abs(triples - np.transpose(triples, perm)))
            if asym > tol:
                raise ValueError("structure-constant triples are not symmetric (deviation %g)" % asym)
        triples = np.clip(triples, 0.0, None)
        triples.setflags(write=False)
        if labels is None:
            labels = tuple("m%i" % (i + 1) for i in range(r))
        return IsotropyData(dims=dims, b=b, triples=triples, labels=tuple(labels))


class DiagonalMetric(NamedTuple):
    """Named tuple with the positive scales x_i of a diagonal metric x_1 Q|m_1 + ... + x_r Q|m_r"""

    scales: tuple
    """Positive scale per summand"""

    @staticmethod
    def create(scales):
        """
        :raises ValueError: If any scale is not a finite positive number
        """
        scales = tuple(float(x) for x in scales)
        if len(scales) == 0 or not all(math.isfinite(x) and x > 0 for x in scales):
            raise ValueError("metric scales must be positive, got %s" % str(scales))
        return DiagonalMetric(scales=scales)

    @property
    def x(self):
        """Scales as a numpy array"""
        return np.array(self.scales, dtype=float)

    def scaled(self, t: float):
        """The homothetic metric t * g"""
        return DiagonalMetric.create([t * v for v in self.scales])

    def normalized(self, index: int, value: float):
        """The homothetic metric whose scale at the given index equals value"""
        return self.scaled(value / self.scales[index])


class EinsteinCandidate(NamedTuple):
    """Named tuple with a diagonal metric, its Einstein constant and the per-block residuals"""

    metric: DiagonalMetric
    """The diagonal metric"""

    einstein_constant: float
    """Einstein constant Lambda = s / n"""

    residuals: tuple
    """Residuals r_i - Lambda of the Ricci blocks"""

    gradient_norm: float
    """Euclidean norm of the gradient of the normalized total scalar curvature in the x-coordinates"""

    iterations: int = 0
    """Number of solver iterations used to find the metric (0 for closed-form metrics)"""

    @property
    def max_residual(self):
        """Largest absolute block residual"""
        return float(max(abs(v) for v in self.residuals))

    def is_einstein_within(self, tol: float):
        """Check residuals and gradient norm against the given tolerance"""
        return self.max_residual <= tol and self.gradient_norm <= tol

    @property
    def is_einstein(self):
        """True if residuals and gradient norm are within EINSTEIN_TOL"""
        return self.is_einstein_within(EINSTEIN_TOL)


class StabilityVerdict(NamedTuple):
    """
    Named tuple with a stability classification and the numerical witness it is derived from.

    A verdict is S-linearly-unstable if the second variation of the normalized total scalar curvature
    is positive on an invariant TT direction, or if a curated eigenvalue lies strictly below its
    instability threshold. A verdict is nu-unstable-conformal if a Laplace eigenvalue lies strictly
    below 2 * Lambda.
    """

    classification: str
    """One of S_UNSTABLE, NU_CONFORMAL, INCONCLUSIVE"""

    direction: tuple = None
    """Coefficients c_i of the invariant direction h = sum c_i Q|m_i (second-variation witness)"""

    second_variation: float = None
    """Value of d^2/dt^2 S(g + t h) at t = 0 (second-variation witness)"""

    eigenvalue: object = None
    """Eigenvalue tested against the threshold (spectral witness); float or sympy Rational"""

    threshold: object = None
    """Threshold the eigenvalue is compared with, e.g., 2 * Lambda"""

    coindex_lower_bound: int = 0
    """Lower bound for the coindex, i.e., the dimension of a destabilizing subspace"""

    note: str = ""
    """Free-text note, e.g., a citation"""

    details: OrderedDict = None
    """OrderedDict with further witness values of the certificate"""

    S_UNSTABLE = "S-linearly-unstable"
    NU_CONFORMAL = "nu-unstable-conformal"
    INCONCLUSIVE = "inconclusive"
    CLASSIFICATIONS = (S_UNSTABLE, NU_CONFORMAL, INCONCLUSIVE)

    @property
    def gap(self):
        """threshold - eigenvalue, positive when the spectral inequality holds"""
        if self.eigenvalue is None or self.threshold is None:
            return None
        return self.threshold - self.eigenvalue

    @staticmethod
    def from_second_variation(direction, second_variation: float, coindex: int = 1, note: str = "",
                              details: OrderedDict = None):
        """Create the verdict for an invariant direction, S-linearly-unstable iff the value is positive"""
        unstable = second_variation > 0
        return StabilityVerdict(
            classification=StabilityVerdict.S_UNSTABLE if unstable else StabilityVerdict.INCONCLUSIVE,
            direction=tuple(float(c) for c in direction),
            second_variation=float(second_variation),
            coindex_lower_bound=coindex if unstable else 0,
            note=note,
            details=details)

    @staticmethod
    def from_eigenvalue(eigenvalue, threshold, unstable_class: str, coindex: int = 1, note: str = "",
                        details: OrderedDict = None):
        """
        Create the verdict for a spectral criterion: unstable_class iff eigenvalue < threshold strictly.
        The equality case is inconclusive.
        """
        if unstable_class not in (StabilityVerdict.S_UNSTABLE, StabilityVerdict.NU_CONFORMAL):
            raise ValueError("unstable_class must be an instability classification, got %s" % unstable_class)
        unstable = bool(eigenvalue < threshold)
        return StabilityVerdict(
            classification=unstable_class if unstable else StabilityVerdict.INCONCLUSIVE,
            eigenvalue=eigenvalue,
            threshold=threshold,
            coindex_lower_bound=coindex if unstable else 0,
            note=note,
            details=details)

    @property
    def witness_holds(self):
        """Re-evaluate the witness inequality: positive second variation or eigenvalue strictly below threshold"""
        if self.second_variation is not None:
            return bool(self.second_variation > 0)
        if self.eigenvalue is not None and self.threshold is not None:
            return bool(self.eigenvalue < self.threshold)
        return False

    def verify(self):
        """
        :raises InvariantViolation: If the classification does not follow from the witness
        """
        if self.classification not in self.CLASSIFICATIONS:
            raise InvariantViolation("unknown classification %s" % self.classification)
        if self.classification == self.NU_CONFORMAL and self.second_variation is not None:
            raise InvariantViolation("a conformal verdict needs a spectral witness")
        unstable = self.classification != self.INCONCLUSIVE
        if unstable != self.witness_holds:
            raise InvariantViolation("stored classification %s does not follow from the witness" %
                                     self.classification)
        return True


def _orthonormal_vectors(basis: AdaptedBasis, form: BackgroundForm, tol: float):
    """
    Orthonormalize every summand of the complement with respect to the form.

    :return: Tuple (vectors, block) with the stacked orthonormal matrices and the summand index of each
    """
    basis.check_orthogonal(form, tol=tol)
    alg = basis.algebra
    vectors, block = [], []
    for index, label in enumerate(basis.labels):
        vecs = np.array(basis.vectors(label))
        gram = alg.gram(vecs, vecs, form)
        # Cholesky: gram = L L^T, so the rows of L^{-1} vecs are orthonormal
        chol = np.linalg.cholesky(gram)
        vecs = np.einsum('ab,bij->aij', np.linalg.inv(chol), vecs)
        vectors.extend(vecs)
        block.extend([index] * len(vecs))
    return np.array(vectors), np.array(block, dtype=int)


def _bracket_coefficients(basis: AdaptedBasis, form: BackgroundForm, vectors: np.ndarray):
    """Array C with C[a, b, c] = form([e_a, e_b], e_c) for the orthonormal vectors e"""
    brackets = np.einsum('aij,bjk->abik', vectors, vectors)
    brackets = brackets - np.swapaxes(brackets, 0, 1)
    count = vectors.shape[0]
    flat = brackets.reshape(count * count, *vectors.shape[1:])
    return basis.algebra.gram(flat, vectors, form).reshape(count, count, count)


def structure_triples(basis: AdaptedBasis, form: BackgroundForm, tol: float = 1e-10):
    """
    Compute the IsotropyData of an adapted basis with respect to a background form.

    The triples are T[i][j][k] = sum form([e_a, e_b], e_c)^2 over form-orthonormal vectors e_a in m_i,
    e_b in m_j, e_c in m_k, and b_i is the ratio of the negative Killing form to the form on m_i.

    :param basis: AdaptedBasis of the homogeneous space
    :param form: Background form Q
    :param tol: Tolerance for the orthogonality and constancy checks
    :raises InvariantViolation: If the summands are not orthogonal or -B/Q is not constant on a summand
    """
    vectors, block = _orthonormal_vectors(basis, form, tol)
    coeffs = _bracket_coefficients(basis, form, vectors)
    r = len(basis.labels)
    onehot = np.eye(r)[block]
    triples = np.einsum('abc,ai,bj,ck->ijk', coeffs ** 2, onehot, onehot, onehot, optimize=True)
    neg_killing = np.diag(basis.algebra.gram(vectors, vectors, BackgroundForm.negative_killing()))
    b_values = []
    for index, label in enumerate(basis.labels):
        ratios = neg_killing[block == index]
        spread = float(np.max(ratios) - np.min(ratios))
        if spread > tol * max(1.0, abs(float(np.mean(ratios)))):
            raise InvariantViolation("-B/Q is not constant on summand %s" % label, spread, tol)
        b_values.append(float(np.mean(ratios)))
    # symmetrize to remove rounding noise before validation
    triples = sum(np.transpose(triples, perm) for perm in
                  ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))) / 6.0
    return IsotropyData.create(dims=basis.dims, b=b_values, triples=triples, labels=basis.labels, tol=tol)


def _check_metric(data: IsotropyData, g: DiagonalMetric):
    x = g.x
    if x.shape != (data.r,):
        raise ValueError("metric has %i scales but the space has %i summands" % (x.shape[0], data.r))
    return x


def scalar_curvature(data: IsotropyData, g: DiagonalMetric):
    """
    Scalar curvature s = 1/2 sum d_i b_i / x_i - 1/4 sum [ijk] x_k / (x_i x_j)
    """
    x = _check_metric(data, g)
    d = np.array(data.dims, dtype=float)
    b = np.array(data.b)
    first = 0.5 * np.sum(d * b / x)
    second = 0.25 * np.einsum('ijk,i,j,k->', data.triples, 1.0 / x, 1.0 / x, x)
    return float(first - second)


def ricci_blocks(data: IsotropyData, g: DiagonalMetric):
    """
    Ricci coefficients r_k with Ric = r_k g on m_k:

    r_k = b_k / (2 x_k) + 1/(4 d_k) sum_ij [ijk] x_k / (x_i x_j) - 1/(2 d_k) sum_ij [kij] x_j / (x_k x_i)

    :return: numpy array of length r
    """
    x = _check_metric(data, g)
    d = np.array(data.dims, dtype=float)
    b = np.array(data.b)
    inv = 1.0 / x
    gain = np.einsum('ijk,i,j->k', data.triples, inv, inv) * x / (4.0 * d)
    loss = np.einsum('kij,i,j->k', data.triples, inv, x) * inv / (2.0 * d)
    return b / (2.0 * x) + gain - loss


def volume_factor(data: IsotropyData, g: DiagonalMetric):
    """Volume of g relative to the background form, prod x_i^(d_i / 2)"""
    x = _check_metric(data, g)
    return float(np.prod(x ** (np.array(data.dims) / 2.0)))


def normalized_total_scalar(data: IsotropyData, g: DiagonalMetric):
    """Normalized total scalar curvature volume^(2/n) * s, invariant under homotheties"""
    return volume_factor(data, g) ** (2.0 / data.n) * scalar_curvature(data, g)


class NormalizedScalarFunctional:
    """
    The normalized total scalar curvature as a sum of monomials c_t * prod x^E_t, which gives
    exact gradients and Hessians in the x-coordinates
    """

    def __init__(self, data: IsotropyData):
        self.data = data
        r = data.r
        weights = np.array(data.dims, dtype=float) / data.n
        coefs, exps = [], []
        eye = np.eye(r)
        for i in range(r):
            coefs.append(0.5 * data.dims[i] * data.b[i])
            exps.append(-eye[i])
        for i, j, k in zip(*np.nonzero(data.triples)):
            coefs.append(-0.25 * data.triples[i, j, k])
            exps.append(eye[k] - eye[i] - eye[j])
        self.coefs = np.array(coefs)
        self.exps = np.array(exps) + weights[None, :]

    def monomials(self, x: np.ndarray):
        """Values c_t * prod x^E_t of all monomials"""
        return self.coefs * np.exp(self.exps @ np.log(x))

    def value(self, x: np.ndarray):
        """Value of the functional at x"""
        return float(np.sum(self.monomials(x)))

    def gradient(self, x: np.ndarray):
        """Gradient in the x-coordinates"""
        return (self.monomials(x) @ self.exps) / x

    def hessian(self, x: np.ndarray):
        """Hessian in the x-coordinates"""
        terms = self.monomials(x)
        outer = np.einsum('t,tl,tm->lm', terms, self.exps, self.exps)
        diag = np.diag(terms @ self.exps)
        return (outer - diag) / np.outer(x, x)


def grad_hess(data: IsotropyData, g: DiagonalMetric):
    """
    Analytic gradient and Hessian of the normalized total scalar curvature in the x-coordinates

    :return: Tuple (gradient, hessian) of numpy arrays
    """
    x = _check_metric(data, g)
    functional = NormalizedScalarFunctional(data)
    return functional.gradient(x), functional.hessian(x)


def second_variation(data: IsotropyData, g: DiagonalMetric, direction):
    """
    Second variation d^2/dt^2 S(g + t h) at t = 0 of the normalized total scalar curvature along the
    diagonal direction h = sum c_i Q|m_i
    """
    c = np.asarray(direction, dtype=float)
    _, hess = grad_hess(data, g)
    return float(c @ hess @ c)


def finite_difference_gradient(func, x, rel_step: float = FD_STEP):
    """Gradient of a scalar function by central differences with step rel_step * |x_i|"""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        h = rel_step * max(abs(x[i]), 1e-300)
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (func(xp) - func(xm)) / (2.0 * h)
    return grad


def finite_difference_hessian(grad_func, x, rel_step: float = FD_STEP):
    """Hessian as the symmetrized central-difference Jacobian of a gradient function"""
    x = np.asarray(x, dtype=float)
    dim = x.shape[0]
    jac = np.zeros((dim, dim))
    for i in range(dim):
        h = rel_step * max(abs(x[i]), 1e-300)
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (np.asarray(grad_func(xp)) - np.asarray(grad_func(xm))) / (2.0 * h)
    return 0.5 * (jac + jac.T)


def fd_second_variation(data: IsotropyData, g: DiagonalMetric, direction, rel_step: float = 1e-4):
    """
    Second variation along a diagonal direction by a central second difference of function values only
    """
    x = _check_metric(data, g)
    c = np.asarray(direction, dtype=float)
    active = np.abs(c) > 0
    if not np.any(active):
        return 0.0
    h = rel_step * float(np.min(x[active])) / float(np.max(np.abs(c)))
    functional = NormalizedScalarFunctional(data)
    return (functional.value(x + h * c) - 2.0 * functional.value(x) + functional.value(x - h * c)) / (h * h)


def einstein_candidate(data: IsotropyData, g: DiagonalMetric, iterations: int = 0):
    """Evaluate Einstein constant, block residuals, and gradient norm at a given metric"""
    s = scalar_curvature(data, g)
    einstein_constant = s / data.n
    residuals = ricci_blocks(data, g) - einstein_constant
    grad, _ = grad_hess(data, g)
    return EinsteinCandidate(metric=g,
                             einstein_constant=float(einstein_constant),
                             residuals=tuple(float(v) for v in residuals),
                             gradient_norm=float(np.linalg.norm(grad)),
                             iterations=iterations)


def certify_einstein(candidate: EinsteinCandidate, tol: float = EINSTEIN_TOL, label: str = "metric"):
    """
    :raises InvariantViolation: If the candidate block residuals exceed the tolerance
    """
    if candidate.max_residual > tol:
        raise InvariantViolation("%s is not Einstein" % label, candidate.max_residual, tol)
    return candidate


def find_einstein(data: IsotropyData, start: DiagonalMetric, max_iterations: int = MAX_NEWTON_ITERATIONS,
                  tol: float = EINSTEIN_TOL):
    """
    Find a critical point of the normalized total scalar curvature, i.e., an Einstein metric.

    The iteration works in logarithmic coordinates y = log x, where homothety invariance makes the
    Hessian singular along (1, ..., 1). The gauge sum d_i y_i = 0 (volume 1) is appended as an extra
    equation and the system is solved by Newton steps with Levenberg-Marquardt damping.

    :param data: IsotropyData of the space
    :param start: Starting metric with positive entries
    :param max_iterations: Maximum number of iterations
    :param tol: Tolerance for flagging the result as Einstein
    :return: EinsteinCandidate at the volume-normalized critical point
    :raises SolverError: If the iteration does not converge
    """
    y = np.log(_check_metric(data, start))
    d = np.array(data.dims, dtype=float)
    functional = NormalizedScalarFunctional(data)
    y = y - (d @ y) / data.n

    def residual(yv):
        xv = np.exp(yv)
        return np.concatenate([xv * functional.gradient(xv), [d @ yv]])

    def jacobian(yv):
        xv = np.exp(yv)
        grad = functional.gradient(xv)
        hess_y = np.outer(xv, xv) * functional.hessian(xv) + np.diag(xv * grad)
        return np.vstack([hess_y, d[None, :]])

    res = residual(y)
    damping = 0.0
    for iteration in range(1, max_iterations + 1):
        scale = max(1.0, abs(functional.value(np.exp(y))))
        if np.max(np.abs(res)) <= 1e-13 * scale:
            return einstein_candidate(data, DiagonalMetric.create(np.exp(y)), iterations=iteration - 1)
        jac = jacobian(y)
        normal = jac.T @ jac
        rhs = -jac.T @ res
        accepted = False
        for _ in range(30):
            step = np.linalg.solve(normal + damping * np.diag(np.diag(normal)), rhs)
            trial = residual(y + step)
            if np.all(np.isfinite(trial)) and np.linalg.norm(trial) < np.linalg.norm(res):
                accepted = True
                break
            damping = max(1e-6, 10.0 * damping)
        if not accepted:
            break
        y = y + step
        res = trial
        damping = damping / 10.0 if damping > 1e-9 else 0.0
        if np.max(np.abs(step)) < 1e-15:
            break
    candidate = einstein_candidate(data, DiagonalMetric.create(np.exp(y)), iterations=iteration)
    if candidate.is_einstein_within(tol):
        if candidate.max_residual > 1e-3 * tol:
            warnings.warn("Einstein iteration stagnated at residual %.2e" % candidate.max_residual)
        return candidate
    raise SolverError("Einstein iteration did not converge after %i iterations (residual %.3e)" %
                      (iteration, candidate.max_residual),
                      last_iterate=candidate.metric, iterations=iteration)


def divergence_invariant(basis: AdaptedBasis, form: BackgroundForm, g: DiagonalMetric, c, tol: float = 1e-10):
    """
    Evaluate the divergence of the diagonal invariant tensor h = sum c_i Q|m_i with respect to g,

    (delta_g h)(X_j) = sum_{i,k} h(X_j, X_k) g([X_k, X_i], X_i) - sum_i h([X_j, X_i]_m, X_i),

    for every vector X_j of a g-orthonormal adapted basis.

    For a bi-invariant background form the traces g([X_k, X_i], X_i) vanish, so every diagonal direction
    is divergence-free and a nonzero value points at broken structure data (a non-invariant form or a
    basis that is not adapted), not at a bad direction.

    :return: numpy array with one value per adapted basis vector
    """
    x = g.x
    c = np.asarray(c, dtype=float)
    if x.shape != (len(basis.labels),) or c.shape != x.shape:
        raise ValueError("metric and direction must have one entry per summand")
    vectors, block = _orthonormal_vectors(basis, form, tol)
    coeffs = _bracket_coefficients(basis, form, vectors)
    xv, cv = x[block], c[block]
    trace_part = np.einsum('jii->ji', coeffs)
    first = (cv / xv) * np.sum(trace_part, axis=1) / np.sqrt(xv)
    second = np.sum(trace_part * (cv / xv)[None, :], axis=1) / np.sqrt(xv)
    return first - second


def check_divergence_free(basis: AdaptedBasis, form: BackgroundForm, g: DiagonalMetric, c,
                          tol: float = DIVERGENCE_TOL):
    """
    :return: The largest absolute divergence value
    :raises InvariantViolation: If the direction is not divergence-free within the tolerance
    """
    worst = float(np.max(np.abs(divergence_invariant(basis, form, g, c))))
    if worst > tol:
        raise InvariantViolation("diagonal direction is not divergence-free", worst, tol)
    return worst
