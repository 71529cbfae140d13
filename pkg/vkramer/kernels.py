"""operator-valued entire functions F and their reproducing kernels."""
import numpy as np

from .derivatives import cauchy_riemann_residual
from .errors import KernelBuildError
from .hilbert import adjoint, as_operator, orthonormal_columns
from .scalar_entire import leave_one_out

ZAYED = "zayed"
RESOLVENT = "resolvent"
RANK_ONE_QUASI = "rank_one_quasi"
MATRIX_POLY = "matrix_poly"
FAMILIES = (ZAYED, RESOLVENT, RANK_ONE_QUASI, MATRIX_POLY)


class VectorEntire:
    """A(z) = sum_n l_n(z) u_n with l_n the lagrange basis polynomials on nodes.

    A(z_n) = u_n exactly, and A never vanishes: a common zero of all l_n
    would have to be a node, where one of them equals 1.
    """

    def __init__(self, nodes, basis):
        self.nodes = np.asarray(nodes, dtype=complex)
        self.basis = basis
        self.weights = np.array([
            1.0 / np.prod(np.delete(self.nodes[n] - self.nodes, n)) for n in range(self.nodes.size)
        ])

    def components(self, z):
        """lagrange basis values l_n(z), without division by z - z_n."""
        return self.weights * leave_one_out(complex(z) - self.nodes)

    def __call__(self, z):
        return self.basis @ self.components(z)


class KernelFunction:
    """z -> F(z) in B(X) for one of the four families.

    basis columns are the u_n; node_index[j] is the position in nodes of the
    node attached to column j (identity except for resolvent multiplicities).
    """

    def __init__(self, family, basis, nodes=None, node_index=None, Q=None, a=None, A=None, coefficients=()):
        self.family = family
        self.basis = basis
        self.nodes = nodes
        self.node_index = node_index
        self.Q = Q
        self.a = a
        self.A = A
        self.coefficients = coefficients

    def __repr__(self):
        return f"KernelFunction(family={self.family!r}, dim={self.dim})"


    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def column_nodes(self):
        """node attached to each basis column."""
        return self.nodes[self.node_index]

    @property
    def multiplicities(self):
        return np.bincount(self.node_index, minlength=self.nodes.size)

    @property
    def has_sampling_data(self):
        return self.nodes is not None and self.node_index is not None


def evaluate(F, z):
    """F(z) as a dense d x d matrix."""
    z = complex(z)

    if F.family in (ZAYED, RESOLVENT):
        q = np.array([F.Q.reg_quotient(z, n) for n in range(F.nodes.size)])
        return (F.basis * q[F.node_index]) @ adjoint(F.basis)

    if F.family == RANK_ONE_QUASI:
        q = np.array([F.Q.reg_quotient(z, n) for n in range(F.nodes.size)])
        return np.outer(F.A(z), F.basis.conj() @ (F.a * q))

    # horner on the coefficient matrices
    result = np.zeros((F.dim, F.dim), dtype=complex)
    for coeff in reversed(F.coefficients):
        result = result * z + coeff
    return result


def evaluate_adjoint(F, z):
    return adjoint(evaluate(F, z))


def sampling_function(F, n, z):
    """F_n(z) = F(z) u_n."""
    return evaluate(F, z) @ F.basis[:, n]


def reproducing_kernel(F, gamma, z):
    """K_gamma(z) = F(z) F(gamma)*."""
    return evaluate(F, z) @ evaluate_adjoint(F, gamma)


def analyticity_residual(F, points):
    """max cauchy-riemann residual of z -> F(z) over points."""
    return max(cauchy_riemann_residual(lambda w: evaluate(F, w), z) for z in points)


def make_grid(nodes, count=20, real_span=None, circle_radius=None):
    """count points on a real interval plus count points on a circle.

    defaults: the interval spans the nodes' real parts +/- 2, the circle has
    radius max|z_n| + 3 around the origin.
    """
    nodes = np.asarray(nodes, dtype=complex)
    if real_span is None:
        real_span = (float(np.min(nodes.real)) - 2.0, float(np.max(nodes.real)) + 2.0)
    if circle_radius is None:
        circle_radius = float(np.max(np.abs(nodes))) + 3.0

    line = np.linspace(real_span[0], real_span[1], count).astype(complex)
    angles = 2 * np.pi * (np.arange(count) + 0.5) / count
    circle = circle_radius * np.exp(1j * angles)
    return np.concatenate([line, circle])


def _check_basis(basis, count):
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise KernelBuildError(f"basis must be a square matrix of columns, got shape {basis.shape}")
    if basis.shape[1] != count:
        raise KernelBuildError(f"node/basis count mismatch: {count} nodes, {basis.shape[1]} basis vectors")
    if not orthonormal_columns(basis):
        raise KernelBuildError("basis vectors are not orthonormal")
    return basis


def _check_nodes_match(Q, nodes):
    nodes = np.asarray(Q.nodes if nodes is None else nodes, dtype=complex).reshape(-1)
    if nodes.size != Q.nodes.size or not np.allclose(nodes, Q.nodes, rtol=0, atol=1e-12):
        raise KernelBuildError("Q zero-set mismatch: kernel nodes differ from the nodes of Q")
    Q.check_simple_zeros()
    return Q.nodes


def build_zayed(Q, nodes, basis):
    """F(z)u = sum_n Q(z)/(z - z_n) <u, u_n> u_n, Q'(z_n) <u, u_n> u_n at z_n."""
    nodes = _check_nodes_match(Q, nodes)
    basis = _check_basis(basis, nodes.size)
    return KernelFunction(ZAYED, basis, nodes, np.arange(nodes.size), Q)


def build_resolvent(Q, spectrum):
    """F(z) = Q(z) (zI - T)^{-1} for a symmetric T given by its spectrum.

    spectrum is a list of (z_n, vectors) with vectors a d x k_n array whose
    columns span the eigenspace of z_n.
    """
    if not spectrum:
        raise KernelBuildError("resolvent needs a nonempty spectrum")

    nodes, columns, index = [], [], []
    for n, (zn, vectors) in enumerate(spectrum):
        zn = complex(zn)
        if abs(zn.imag) > 1e-12 * (1.0 + abs(zn)):
            raise KernelBuildError(f"non-real resolvent node {zn:.6g}: T must be symmetric")
        vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if vectors.shape[1] == 0:
            raise KernelBuildError(f"node {n} has multiplicity 0")
        nodes.append(zn.real)
        columns.append(vectors)
        index.extend([n] * vectors.shape[1])

    nodes = _check_nodes_match(Q, nodes)
    basis = np.hstack(columns)
    if basis.shape[0] != basis.shape[1]:
        raise KernelBuildError(f"multiplicities sum to {basis.shape[1]}, dimension is {basis.shape[0]}")
    if not orthonormal_columns(basis):
        raise KernelBuildError("resolvent eigenvectors are not orthonormal")
    return KernelFunction(RESOLVENT, basis, nodes, np.asarray(index), Q)


def build_rank_one_quasi(Q, nodes, basis, c=None):
    """F(z)u = Q(z) (sum_n a_n <u, u_n>/(z - z_n)) A(z), a_n = c_n / Q'(z_n)."""
    nodes = _check_nodes_match(Q, nodes)
    basis = _check_basis(basis, nodes.size)

    slopes = np.array([Q.deriv(zn) for zn in nodes])
    c = slopes if c is None else np.asarray(c, dtype=complex).reshape(-1)
    if c.size != nodes.size:
        raise KernelBuildError(f"{c.size} sampling coefficients for {nodes.size} nodes")
    if np.any(np.abs(c) == 0.0):
        raise KernelBuildError("sampling coefficients c_n must be nonzero")

    return KernelFunction(
        RANK_ONE_QUASI, basis, nodes, np.arange(nodes.size), Q,
        a=c / slopes, A=VectorEntire(nodes, basis),
    )


def build_matrix_poly(coefficients, Q=None, nodes=None, basis=None):
    """F(z) = sum_k C_k z^k; nodes and basis are optional sampling metadata."""
    coefficients = tuple(as_operator(c) for c in coefficients)
    if not coefficients:
        raise KernelBuildError("matrix polynomial needs at least one coefficient")
    d = coefficients[0].shape[0]
    if any(c.shape != (d, d) for c in coefficients):
        raise KernelBuildError("matrix polynomial coefficients differ in shape")

    if nodes is None:
        return KernelFunction(MATRIX_POLY, np.eye(d, dtype=complex), coefficients=coefficients)

    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    basis = np.eye(d, dtype=complex) if basis is None else _check_basis(basis, nodes.size)
    return KernelFunction(MATRIX_POLY, basis, nodes, np.arange(nodes.size), Q, coefficients=coefficients)
