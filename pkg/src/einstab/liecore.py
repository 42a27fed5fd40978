"""
Module for explicit matrix models of the Lie algebras su(n) and so(n), their background
bilinear forms, and the adapted bases of the homogeneous spaces analyzed by einstab
"""
import math
from collections import OrderedDict
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation

MATRIX_TOL = 1e-12
"""Absolute tolerance for all matrix-level self-checks"""


class BackgroundForm(NamedTuple):
    """
    Named tuple describing an Ad-invariant positive definite background form on a compact
    Lie algebra. The form is either a multiple of the negative trace form, i.e.,
    ``-scale * Re tr(XY)``, or a multiple of the negative Killing form.
    """

    kind: str
    """One of BackgroundForm.TRACE or BackgroundForm.KILLING"""

    scale: float = 1.0
    """Positive coefficient multiplying the negative trace or negative Killing form"""

    TRACE = 'trace'
    KILLING = 'killing'

    @staticmethod
    def trace(scale: float = 1.0):
        """Get the form ``-scale * tr(XY)``"""
        if scale <= 0:
            raise ValueError("scale of the trace form must be positive, got %s" % str(scale))
        return BackgroundForm(kind=BackgroundForm.TRACE, scale=float(scale))

    @staticmethod
    def negative_killing(scale: float = 1.0):
        """Get the form ``-scale * B(X, Y)`` where B is the Killing form"""
        if scale <= 0:
            raise ValueError("scale of the Killing form must be positive, got %s" % str(scale))
        return BackgroundForm(kind=BackgroundForm.KILLING, scale=float(scale))

    @property
    def label(self):
        """Short human-readable label, e.g., ``-6tr`` or ``-B``"""
        coef = "%g" % self.scale if self.scale != 1.0 else ""
        return "-%s%s" % (coef, "tr" if self.kind == self.TRACE else "B")


def _bracket(x, y):
    return x @ y - y @ x


class LieAlgebraSpec:
    """
    Matrix model of su(n) or so(n). The basis is orthogonal with respect to the trace form,
    which makes coordinates of an element cheap to compute. All arrays are read-only.
    """
    FAMILIES = ('su', 'so')

    def __init__(self, family: str, n: int, basis: np.ndarray):
        """
        :param family: Either 'su' or 'so'
        :param n: Size of the defining matrices
        :param basis: Array of shape (dim, n, n) with the basis matrices
        """
        self.family = family
        self.n = n
        self.basis = np.array(basis, dtype=np.complex128)
        self.basis.setflags(write=False)
        self.__norms = np.array([np.real(np.trace(b @ b)) for b in self.basis])
        self.__structure_constants = None
        self.__killing_matrix = None

    @property
    def dim(self):
        """Dimension of the real Lie algebra"""
        return self.basis.shape[0]

    @property
    def expected_dim(self):
        """Dimension predicted by the family, i.e., n^2-1 for su(n) and n(n-1)/2 for so(n)"""
        return self.n * self.n - 1 if self.family == 'su' else self.n * (self.n - 1) // 2

    @property
    def killing_scale(self):
        """
        Constant c with ``-B(X, Y) = c * (-tr(XY))``, i.e., 2n for su(n) and n-2 for so(n)
        """
        return 2.0 * self.n if self.family == 'su' else float(self.n - 2)

    @staticmethod
    def bracket(x: np.ndarray, y: np.ndarray):
        """Matrix commutator [x, y]"""
        return _bracket(x, y)

    @staticmethod
    def trace_form(x: np.ndarray, y: np.ndarray):
        """The real part of tr(xy)"""
        return float(np.real(np.trace(x @ y)))

    def coordinates(self, x: np.ndarray):
        """
        Coordinates of x with respect to the basis. Components of x outside the real span
        of the basis are silently dropped; use :py:meth:`closure_residual` to detect them.
        """
        traces = np.real(np.einsum('...ij,kji->...k', x, self.basis))
        return traces / self.__norms

    def from_coordinates(self, coords):
        """Matrix with the given basis coordinates"""
        return np.einsum('k,kij->ij', np.asarray(coords, dtype=float), self.basis)

    @property
    def structure_constants(self):
        """Array f with [b_i, b_j] = sum_k f[i, j, k] b_k"""
        if self.__structure_constants is None:
            consts = np.zeros((self.dim, self.dim, self.dim))
            for i in range(self.dim):
                for j in range(i + 1, self.dim):
                    consts[i, j] = self.coordinates(_bracket(self.basis[i], self.basis[j]))
                    consts[j, i] = -consts[i, j]
            consts.setflags(write=False)
            self.__structure_constants = consts
        return self.__structure_constants

    def ad(self, x: np.ndarray):
        """Matrix of ad(x) acting on basis coordinates"""
        return np.einsum('i,ijk->kj', self.coordinates(x), self.structure_constants)

    @property
    def killing_matrix(self):
        """Gram matrix B(b_i, b_j) = tr(ad b_i ad b_j) of the Killing form in the basis"""
        if self.__killing_matrix is None:
            consts = self.structure_constants
            killing = np.einsum('ilk,jkl->ij', consts, consts)
            killing.setflags(write=False)
            self.__killing_matrix = killing
        return self.__killing_matrix

    def killing_form(self, x: np.ndarray, y: np.ndarray):
        """Killing form B(x, y) computed via the trace of ad(x) ad(y)"""
        return float(self.coordinates(x) @ self.killing_matrix @ self.coordinates(y))

    def inner(self, x: np.ndarray, y: np.ndarray, form: BackgroundForm):
        """Evaluate the background form on two elements of the algebra"""
        if form.kind == BackgroundForm.TRACE:
            return -form.scale * self.trace_form(x, y)
        if form.kind == BackgroundForm.KILLING:
            return -form.scale * self.killing_form(x, y)
        raise ValueError("unknown background form kind %s" % form.kind)

    def gram(self, xs, ys, form: BackgroundForm):
        """
        Matrix of form values between two stacks of matrices

        :param xs: Array of shape (a, n, n)
        :param ys: Array of shape (b, n, n)
        :return: Array of shape (a, b) with entries form(xs[i], ys[j])
        """
        xs = np.asarray(xs)
        ys = np.asarray(ys)
        if form.kind == BackgroundForm.TRACE:
            return -form.scale * np.real(np.einsum('aij,bji->ab', xs, ys))
        if form.kind == BackgroundForm.KILLING:
            return -form.scale * (self.coordinates(xs) @ self.killing_matrix @ self.coordinates(ys).T)
        raise ValueError("unknown background form kind %s" % form.kind)

    def closure_residual(self):
        """Largest norm of the part of a basis bracket that lies outside the span of the basis"""
        worst = 0.0
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                br = _bracket(self.basis[i], self.basis[j])
                rest = br - self.from_coordinates(self.coordinates(br))
                worst = max(worst, float(np.linalg.norm(rest)))
        return worst

    def jacobi_residual(self):
        """Largest violation of the Jacobi identity over all basis triples, via structure constants"""
        f = self.structure_constants
        jac = (np.einsum('bcm,amn->abcn', f, f) +
               np.einsum('cam,bmn->abcn', f, f) +
               np.einsum('abm,cmn->abcn', f, f))
        return float(np.max(np.abs(jac))) if jac.size > 0 else 0.0

    def killing_residual(self):
        """
        Largest relative deviation between the ad-trace Killing form and
        ``killing_scale * tr`` on basis pairs
        """
        trace_gram = np.real(np.einsum('iab,jba->ij', self.basis, self.basis))
        expected = self.killing_scale * trace_gram
        return float(np.max(np.abs(self.killing_matrix - expected)) / np.max(np.abs(expected)))

    def self_test(self, tol: float = MATRIX_TOL):
        """
        Run the closure, Jacobi, and Killing-form checks.

        :raises InvariantViolation: If one of the checks exceeds the tolerance
        """
        if self.dim != self.expected_dim:
            raise InvariantViolation("%s(%i) has %i basis elements, expected %i" %
                                     (self.family, self.n, self.dim, self.expected_dim))
        for name, value in (('bracket closure', self.closure_residual()),
                            ('Jacobi identity', self.jacobi_residual()),
                            ('Killing form scale', self.killing_residual())):
            if value > tol:
                raise InvariantViolation("%s failed for %s(%i)" % (name, self.family, self.n), value, tol)
        return True


def _unit(n, i, j):
    m = np.zeros((n, n), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def _su_basis(n):
    basis = []
    for k in range(1, n):
        for j in range(k):
            sym = _unit(n, j, k) + _unit(n, k, j)
            asym = -1j * _unit(n, j, k) + 1j * _unit(n, k, j)
            basis.append(-0.5j * sym)
            basis.append(-0.5j * asym)
        diag = np.zeros(n)
        diag[:k] = 1.0
        diag[k] = -float(k)
        basis.append(-0.5j * math.sqrt(2.0 / (k * (k + 1))) * np.diag(diag).astype(np.complex128))
    return np.array(basis)


def so_generator(n: int, i: int, j: int):
    """The matrix E_ij = e_ij - e_ji in so(n) using 1-based indices"""
    return _unit(n, i - 1, j - 1) - _unit(n, j - 1, i - 1)


def _so_basis(n):
    return np.array([so_generator(n, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


@lru_cache(maxsize=None)
def build_algebra(family: str, n: int):
    """
    Build the matrix model of su(n) or so(n).

    The su(n) basis consists of the generalized Gell-Mann matrices multiplied by -i/2, in the usual
    Gell-Mann order for n=3. The so(n) basis consists of E_ij = e_ij - e_ji, i < j, in lexicographic order.

    :param family: Either 'su' or 'so'
    :param n: Matrix size; n >= 2 for su and n >= 3 for so
    :return: LieAlgebraSpec
    :raises ValueError: If the family is unknown or n is out of range
    """
    if family not in LieAlgebraSpec.FAMILIES:
        raise ValueError("family must be one of %s, got %s" % (str(LieAlgebraSpec.FAMILIES), family))
    if not isinstance(n, (int, np.integer)):
        raise ValueError("n must be an integer, got %s" % str(n))
    if family == 'su' and n < 2:
        raise ValueError("su(n) requires n >= 2, got n=%i" % n)
    if family == 'so' and n < 3:
        raise ValueError("so(n) requires n >= 3, got n=%i" % n)
    basis = _su_basis(n) if family == 'su' else _so_basis(n)
    return LieAlgebraSpec(family=family, n=int(n), basis=basis)


class AdaptedBasis(NamedTuple):
    """
    Named tuple with a basis of a Lie algebra adapted to a reductive decomposition
    g = h + m_1 + ... + m_r. Blocks are kept in order, isotropy blocks first.
    """

    algebra: LieAlgebraSpec
    """The ambient Lie algebra"""

    blocks: OrderedDict
    """OrderedDict mapping block labels to tuples of matrices"""

    isotropy: tuple
    """Labels of the blocks spanning the isotropy subalgebra h"""

    @property
    def labels(self):
        """Labels of the summands m_1, ..., m_r of the complement, in order"""
        return [label for label in self.blocks if label not in self.isotropy]

    @property
    def dims(self):
        """Dimensions of the summands m_1, ..., m_r"""
        return [len(self.blocks[label]) for label in self.labels]

    def vectors(self, label: str):
        """Get the matrices spanning the block with the given label"""
        return self.blocks[label]

    @property
    def isotropy_vectors(self):
        """List of all matrices spanning the isotropy subalgebra"""
        return [v for label in self.isotropy for v in self.blocks[label]]

    def orthogonality_residual(self, form: BackgroundForm):
        """Largest |form(x, y)| over all vectors x, y from distinct blocks"""
        labels = list(self.blocks.keys())
        worst = 0.0
        for ia, la in enumerate(labels):
            for lb in labels[ia + 1:]:
                for x in self.blocks[la]:
                    for y in self.blocks[lb]:
                        worst = max(worst, abs(self.algebra.inner(x, y, form)))
        return worst

    def check_orthogonal(self, form: BackgroundForm, tol: float = MATRIX_TOL):
        """
        :raises InvariantViolation: If two distinct blocks are not orthogonal under the form
        """
        residual = self.orthogonality_residual(form)
        if residual > tol:
            raise InvariantViolation("blocks of the adapted basis are not %s-orthogonal" % form.label,
                                     residual, tol)
        return True


def aw_generators(p: int, q: int):
    """
    The generators N, Z, X1, X2, X4, X5, X6, X7 of su(3) for the circle with slopes (p, q).
    No validity checks are applied, so that orientations such as (1, -3) are available
    to the reparametrized N^{130} decomposition.

    :return: OrderedDict mapping generator names to 3x3 complex matrices
    """
    w = math.sqrt(3.0 * p * p + q * q)
    if w == 0:
        raise ValueError("p and q must not both be zero")
    s3 = math.sqrt(3.0)
    gens = OrderedDict()
    n_diag = [-s3 / 6.0 * (q - 3 * p), -s3 / 6.0 * (q + 3 * p), s3 / 3.0 * q]
    z_diag = [(p + q) / 2.0, (p - q) / 2.0, -float(p)]
    gens['N'] = (-1j / w) * np.diag(n_diag).astype(np.complex128)
    gens['Z'] = (-1j / w) * np.diag(z_diag).astype(np.complex128)
    su3 = build_algebra('su', 3)
    # Gell-Mann order: lambda_1, ..., lambda_8 at positions 0, ..., 7
    for index in (1, 2, 4, 5, 6, 7):
        gens['X%i' % index] = np.array(su3.basis[index - 1])
    return gens


def aw_basis(p: int, q: int):
    """
    Adapted basis of su(3) for the Aloff-Wallach space N^{pq0} with blocks
    h={N}, m1={X1,X2}, m2={Z}, m3={X4,X5}, m4={X6,X7}.

    :param p: Integer p >= 0
    :param q: Integer q >= 3p with gcd(p, q) = 1
    :raises ValueError: If (p, q) is not an admissible coprime pair
    """
    validate_pq(p, q)
    gens = aw_generators(p, q)
    blocks = OrderedDict([
        ('h', (gens['N'],)),
        ('m1', (gens['X1'], gens['X2'])),
        ('m2', (gens['Z'],)),
        ('m3', (gens['X4'], gens['X5'])),
        ('m4', (gens['X6'], gens['X7'])),
    ])
    return AdaptedBasis(algebra=build_algebra('su', 3), blocks=blocks, isotropy=('h',))


def validate_pq(p: int, q: int):
    """
    Check that (p, q) labels an Aloff-Wallach space N^{pq0}.

    :raises ValueError: If p, q are not integers with gcd(p, q) = 1, p >= 0, q >= 3p, not both zero
    """
    if not isinstance(p, (int, np.integer)) or not isinstance(q, (int, np.integer)):
        raise ValueError("p and q must be integers, got p=%s, q=%s" % (str(p), str(q)))
    if p == 0 and q == 0:
        raise ValueError("p and q must not both be zero")
    if p < 0:
        raise ValueError("p must be nonnegative, got p=%i" % p)
    if q < 3 * p:
        raise ValueError("q must satisfy q >= 3p, got p=%i, q=%i" % (p, q))
    if math.gcd(int(p), int(q)) != 1:
        raise ValueError("p and q must be coprime, got p=%i, q=%i" % (p, q))


def stiefel_basis(n: int):
    """
    Adapted basis of so(n+1) for the Stiefel manifold V_2(R^{n+1}) = SO(n+1)/SO(n-1) with blocks
    p0={E12}, p1={E_{1,2+i}}, p2={E_{2,2+i}} for i = 1, ..., n-1, and the so(n-1) isotropy block.

    :param n: Integer n >= 3
    :raises ValueError: If n < 3
    """
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise ValueError("the Stiefel manifold requires an integer n >= 3, got %s" % str(n))
    size = n + 1
    blocks = OrderedDict([
        ('so(n-1)', tuple(so_generator(size, a, b) for a in range(3, size + 1) for b in range(a + 1, size + 1))),
        ('p0', (so_generator(size, 1, 2),)),
        ('p1', tuple(so_generator(size, 1, 2 + i) for i in range(1, n))),
        ('p2', tuple(so_generator(size, 2, 2 + i) for i in range(1, n))),
    ])
    return AdaptedBasis(algebra=build_algebra('so', size), blocks=blocks, isotropy=('so(n-1)',))


def nik_basis(angle: float = math.pi / 4):
    """
    Reparametrized adapted basis of su(3) for N^{130} with blocks p1={Y1,Y2}, p2={Y3,Y4},
    p3={X4,X5}, p4={Z}, where the Y's rotate m1 into m4 by the given angle. The summands
    p1 and p2 realize the parameter a = sin^2(2 * angle) of the scalar curvature.

    :param angle: Rotation angle; pi/4 yields a = 1 and 0 reproduces the a = 0 decomposition
    """
    gens = aw_generators(1, -3)
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    y1 = -cos_a * (2 * gens['X2']) - sin_a * (2 * gens['X7'])
    y2 = -cos_a * (2 * gens['X1']) - sin_a * (2 * gens['X6'])
    y3 = sin_a * (2 * gens['X2']) - cos_a * (2 * gens['X7'])
    y4 = sin_a * (2 * gens['X1']) - cos_a * (2 * gens['X6'])
    blocks = OrderedDict([
        ('h', (gens['N'],)),
        ('p1', (y1, y2)),
        ('p2', (y3, y4)),
        ('p3', (gens['X4'], gens['X5'])),
        ('p4', (gens['Z'],)),
    ])
    return AdaptedBasis(algebra=build_algebra('su', 3), blocks=blocks, isotropy=('h',))
