"""the space H_F = {F(.)u : u in X} with its quotient norm.

L(u) = F(.)u identifies H_F with the orthogonal complement of the joint
kernel H of all F(z). every element carries the representative it was
lifted from and its reduced (minimal norm) representative.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DimensionMismatch, KernelMismatch
from .hilbert import (
    RANK_TOL, adjoint, as_vector, inner, joint_kernel, norm, numerical_rank, project,
)
from .kernels import evaluate, evaluate_adjoint

MEMBERSHIP_TOL = 1e-8

# generic points added to the nodes when probing for the joint kernel
GENERIC_PROBES = (0.37 + 0.61j, -1.13 + 0.29j, 2.71 - 0.83j, -0.53 - 1.41j, 1.618 + 2.236j)


def probe_points(F):
    """nodes of F plus five generic points scaled to the node spread."""
    scale = 1.0
    nodes = ()
    if F.nodes is not None:
        nodes = tuple(complex(z) for z in F.nodes)
        scale = 1.0 + float(np.max(np.abs(F.nodes)))
    return nodes + tuple(scale * p for p in GENERIC_PROBES)


def scaled_blocks(blocks):
    """each block divided by max(1, ||block||) before stacking."""
    return [b / max(1.0, float(linalg.svdvals(b)[0])) for b in blocks]


def null_space(F, rank_tol=RANK_TOL):
    """joint kernel H of F over its probe points."""
    return joint_kernel(scaled_blocks([evaluate(F, z) for z in probe_points(F)]), rank_tol)


@dataclass(frozen=True, eq=False)
class RkhsElement:
    """f = F(.)coeff with reduced = coeff minus its projection on H."""

    kernel: object
    coeff: np.ndarray
    reduced: np.ndarray

    def value(self, z):
        return evaluate(self.kernel, z) @ self.coeff

    @property
    def norm(self):
        return norm(self.reduced)

    def __add__(self, other):
        _check_same_kernel(self, other)
        return RkhsElement(self.kernel, self.coeff + other.coeff, self.reduced + other.reduced)

    def __sub__(self, other):
        _check_same_kernel(self, other)
        return RkhsElement(self.kernel, self.coeff - other.coeff, self.reduced - other.reduced)

    def scaled(self, alpha):
        return RkhsElement(self.kernel, alpha * self.coeff, alpha * self.reduced)


def _check_same_kernel(f, g):
    if f.kernel is not g.kernel:
        raise KernelMismatch("elements belong to different kernels")


def lift(F, u, H=None):
    """L(u) = F(.)u; pass H to reuse a precomputed joint kernel."""
    u = as_vector(u)
    if u.size != F.dim:
        raise DimensionMismatch(f"vector of size {u.size} for a kernel in dimension {F.dim}")
    H = null_space(F) if H is None else H
    return RkhsElement(F, u, u - project(u, H))


def inner_H(f, g):
    """<f, g>_H = <f~, g~>_X."""
    _check_same_kernel(f, g)
    return inner(f.reduced, g.reduced)


@dataclass
class IsometryReport:
    is_isometry: bool
    joint_kernel_dim: int
    adjoint_range_rank: int
    consistent: bool


def isometry_check(F, probes, rank_tol=RANK_TOL):
    """L is an isometry iff the joint kernel is trivial iff the adjoint ranges span X."""
    if len(probes) < 1:
        raise ValueError("isometry check needs at least one probe point")

    kernel_dim = joint_kernel(scaled_blocks([evaluate(F, z) for z in probes]), rank_tol).dim
    ranges = np.hstack(scaled_blocks([evaluate_adjoint(F, z) for z in probes]))
    rank = numerical_rank(linalg.svdvals(ranges), rank_tol)

    is_isometry = kernel_dim == 0
    return IsometryReport(is_isometry, kernel_dim, rank, is_isometry == (rank == F.dim))


def reproducing_check(f, gamma, v, H=None):
    """|<f, K_gamma v>_H - <f(gamma), v>_X|."""
    F = f.kernel
    v = as_vector(v)
    kernel_section = lift(F, evaluate_adjoint(F, gamma) @ v, H)
    return abs(inner_H(f, kernel_section) - inner(f.value(gamma), v))


def pointwise_bound_defect(f, z):
    """||f(z)|| - ||F(z)||_op ||f||_H; never positive for a consistent space."""
    op_norm = float(linalg.svdvals(evaluate(f.kernel, z))[0])
    return norm(f.value(z)) - op_norm * f.norm


def parallelogram_defect(f, g):
    """| ||f+g||^2 + ||f-g||^2 - 2||f||^2 - 2||g||^2 |."""
    return abs((f + g).norm ** 2 + (f - g).norm ** 2 - 2 * f.norm ** 2 - 2 * g.norm ** 2)


@dataclass
class MembershipResult:
    u: np.ndarray
    residual: float
    rank: int
    in_space: bool

    @property
    def rank_deficient(self):
        return self.rank < self.u.size


def membership_solve(F, values, grid, tol=MEMBERSHIP_TOL):
    """least-squares u with F(z_j)u = g(z_j) over the grid.

    values holds g(z_j) as rows. each grid block is scaled by
    1/max(1, ||F(z_j)||) before solving; the residual is unweighted,
    relative to 1 + max ||g(z_j)||. the solution is the minimum-norm one,
    so it lies in the complement of the joint kernel.
    """
    values = np.asarray(values, dtype=complex)
    grid = list(grid)
    if values.shape != (len(grid), F.dim):
        raise DimensionMismatch(f"expected values of shape {(len(grid), F.dim)}, got {values.shape}")
    if len(grid) < F.dim:
        raise ValueError(f"membership needs at least d={F.dim} grid points, got {len(grid)}")

    blocks = [evaluate(F, z) for z in grid]
    weights = [1.0 / max(1.0, float(linalg.svdvals(b)[0])) for b in blocks]
    system = np.vstack([w * b for w, b in zip(weights, blocks)])
    rhs = np.concatenate([w * g for w, g in zip(weights, values)])

    u, _, rank, _ = linalg.lstsq(system, rhs, cond=RANK_TOL)

    misfit = max(norm(b @ u - g) for b, g in zip(blocks, values))
    residual = misfit / (1.0 + max(norm(g) for g in values))
    return MembershipResult(u, float(residual), int(rank), residual <= tol)


def local_scale(F, beta, radius=0.1, points=8):
    """size of F around beta; keeps near-zero F(beta) from looking full rank."""
    circle = complex(beta) + radius * np.exp(2j * np.pi * np.arange(points) / points)
    sizes = [float(linalg.svdvals(evaluate(F, w))[0]) for w in circle]
    return max([float(linalg.svdvals(evaluate(F, beta))[0])] + sizes)


def vanishing_subspace(F, beta, H=None, rank_tol=RANK_TOL):
    """orthonormal basis (columns) of H_beta = {u in H-perp : F(beta)u = 0}.

    singular values of F(beta) restricted to H-perp count as zero below
    rank_tol times the local scale of F around beta.
    """
    H = null_space(F) if H is None else H
    complement = H.complement().basis
    if complement.shape[1] == 0:
        return complement

    _, s, vh = linalg.svd(evaluate(F, beta) @ complement, full_matrices=True)
    threshold = rank_tol * local_scale(F, beta)
    rank = int(np.sum(s > threshold)) if threshold > 0 else 0
    return complement @ adjoint(vh[rank:])
