"""finite-dimensional complex inner-product arithmetic.

vectors are 1-d complex128 arrays, operators are d x d complex128 arrays.
the inner product is linear in the first slot and conjugate-linear in the
second.
"""
import numpy as np
from scipy import linalg

from .errors import DimensionMismatch

RANK_TOL = 1e-10
ORTHONORMAL_TOL = 1e-12


def as_vector(coords):
    """coerce coords to a complex vector."""
    u = np.asarray(coords, dtype=complex).reshape(-1)
    if u.size < 1:
        raise DimensionMismatch("vector must have at least one coordinate")
    return u


def as_operator(entries):
    """coerce entries to a square complex matrix."""
    m = np.atleast_2d(np.asarray(entries, dtype=complex))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {m.shape}")
    return m


def inner(u, v):
    """<u, v>, conjugate-linear in v."""
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape:
        raise DimensionMismatch(f"inner product of shapes {u.shape} and {v.shape}")
    return complex(np.vdot(v, u))


def norm(u):
    return float(np.linalg.norm(u))


def adjoint(m):
    return np.asarray(m).conj().T


def basis_vector(d, k):
    e = np.zeros(d, dtype=complex)
    e[k] = 1.0
    return e


class Subspace:
    """span of the orthonormal columns of basis (shape d x k, k may be 0)."""

    def __init__(self, basis):
        self.basis = basis

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def gram_defect(self):
        gram = adjoint(self.basis) @ self.basis
        return float(np.max(np.abs(gram - np.eye(self.dim)), initial=0.0))

    def complement(self):
        """orthonormal basis of the orthogonal complement."""
        if self.dim == 0:
            return Subspace(np.eye(self.ambient_dim, dtype=complex))
        q, _ = linalg.qr(self.basis, mode="full")
        return Subspace(q[:, self.dim:])


def empty_subspace(d):
    return Subspace(np.zeros((d, 0), dtype=complex))


def orthonormal_columns(vectors, tol=ORTHONORMAL_TOL):
    """true when the columns of vectors are orthonormal to tol."""
    vectors = np.asarray(vectors, dtype=complex)
    gram = adjoint(vectors) @ vectors
    return bool(np.max(np.abs(gram - np.eye(gram.shape[0])), initial=0.0) <= tol)


def numerical_rank(singular_values, rank_tol=RANK_TOL):
    """count of singular values above rank_tol relative to the largest."""
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def joint_kernel(ops, rank_tol=RANK_TOL):
    """orthonormal basis of the intersection of the kernels of ops."""
    if not ops:
        raise DimensionMismatch("joint kernel needs at least one operator")

    shapes = {np.shape(op) for op in ops}
    if len(shapes) != 1:
        raise DimensionMismatch(f"operators of different shapes: {sorted(shapes)}")

    stacked = np.vstack([as_operator(op) for op in ops])
    _, s, vh = linalg.svd(stacked, full_matrices=True)
    rank = numerical_rank(s, rank_tol)
    return Subspace(adjoint(vh[rank:]).copy())


def project(u, subspace):
    """orthogonal projection of u onto subspace."""
    u = as_vector(u)
    if u.size != subspace.ambient_dim:
        raise DimensionMismatch(f"vector of size {u.size} vs subspace in dimension {subspace.ambient_dim}")
    b = subspace.basis
    return b @ (adjoint(b) @ u)


def random_vectors(rng, d, count):
    """count complex-normal vectors as the rows of a (count, d) array."""
    return (rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))) / np.sqrt(2.0)


def random_orthonormal_basis(rng, d):
    """haar-like unitary from the qr of a complex-normal matrix."""
    z = random_vectors(rng, d, d)
    q, r = linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases.conj()
