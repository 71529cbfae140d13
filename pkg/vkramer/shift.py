"""generalized backward shift R_beta and the multiplication operator T.

all quotients are stored in the f(z)/(z - beta) orientation.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .derivatives import contour_derivative, divided_value
from .errors import PreconditionViolation
from .hilbert import adjoint, inner, joint_kernel, norm
from .kernels import evaluate, make_grid
from .rkhs import (
    MEMBERSHIP_TOL, lift, local_scale, membership_solve, null_space, scaled_blocks, vanishing_subspace,
)
from .scalar_entire import pole_guard

VANISHING_TOL = 1e-8
ISOMETRY_TOL = 1e-9


@dataclass
class ShiftResult:
    beta: complex
    input: object
    output_coeff: np.ndarray
    in_space: bool
    residual: float
    solved_coeff: np.ndarray
    solve_residual: float


@dataclass
class InvarianceReport:
    beta: complex
    dim_H_beta: int
    all_shifts_in_space: bool
    max_residual: float
    shifts: list = field(default_factory=list)


@dataclass
class MultResult:
    in_domain: bool
    coeff: np.ndarray
    residual: float
    source: object = None

    def shifted_coeff(self, beta):
        """coefficient of (T - beta I)f."""
        return self.coeff - beta * self.source.reduced


@dataclass
class BijectionReport:
    bijective: bool
    dim_z1: int
    dim_z2: int
    image_rank: int
    max_roundtrip: float


@dataclass
class IsometryDefect:
    isometric: bool
    max_norm_defect: float
    dim_H_beta: int


def _grid(S, grid):
    return make_grid(S.nodes) if grid is None else grid


def _node_position(S, beta):
    for m, zm in enumerate(S.nodes):
        if abs(beta - zm) <= pole_guard(zm):
            return m
    return None


def vanishes_at(F, coeff, beta, scale_norm):
    """||F(beta) coeff|| small against the local size of F."""
    bound = VANISHING_TOL * max(1.0, local_scale(F, beta)) * scale_norm
    return norm(evaluate(F, beta) @ coeff) <= bound


def shift_coefficients(S, f, beta):
    """coefficients of f(z)/(z - beta) built from the fourier coefficients of f.

    off the nodes <v, u_n> = <u, u_n>/(z_n - beta); at beta = z_m the m-th
    coefficient is <f'(z_m), u_m>/c_m instead.
    """
    beta = complex(beta)
    coefs = adjoint(S.basis) @ f.reduced
    m = _node_position(S, beta)

    if m is None:
        return S.basis @ (coefs / (S.nodes - beta))

    shifted = np.zeros_like(coefs)
    others = np.arange(coefs.size) != m
    shifted[others] = coefs[others] / (S.nodes[others] - S.nodes[m])
    slope = contour_derivative(f.value, S.nodes[m])
    shifted[m] = inner(slope, S.basis[:, m]) / S.coefficients[m]
    return S.basis @ shifted


def backward_shift(S, f, beta, grid=None, tol=MEMBERSHIP_TOL):
    """R_beta f for f in H_beta, validated by a membership solve on the grid."""
    F = S.kernel
    beta = complex(beta)
    grid = _grid(S, grid)

    if f.norm == 0.0:
        zero = np.zeros(F.dim, dtype=complex)
        return ShiftResult(beta, f, zero, True, 0.0, zero, 0.0)

    if not vanishes_at(F, f.coeff, beta, f.norm):
        raise PreconditionViolation(
            f"f(beta) = {norm(f.value(beta)):.3e} at beta={beta:.6g}: f is not in H_beta"
        )

    v = shift_coefficients(S, f, beta)

    targets = np.array([divided_value(f.value, z, beta) for z in grid])
    misfit = max(norm(evaluate(F, z) @ v - g) for z, g in zip(grid, targets))
    residual = misfit / (1.0 + max(norm(g) for g in targets))

    solved = membership_solve(F, targets, grid, tol)
    return ShiftResult(beta, f, v, residual <= tol, float(residual), solved.u, solved.residual)


def invariance_check(S, betas, grid=None, tol=MEMBERSHIP_TOL):
    """for each beta, shift every basis element of H_beta and test membership."""
    F = S.kernel
    grid = _grid(S, grid)
    H = null_space(F)

    reports = []
    for beta in betas:
        basis = vanishing_subspace(F, beta, H)
        shifts = [backward_shift(S, lift(F, b, H), beta, grid, tol) for b in basis.T]
        reports.append(InvarianceReport(
            complex(beta),
            basis.shape[1],
            all(s.in_space for s in shifts),
            max((s.residual for s in shifts), default=0.0),
            shifts,
        ))
    return reports


def mult_apply(S, f, grid=None, tol=MEMBERSHIP_TOL):
    """T f = z f(z) when it lies in H."""
    F = S.kernel
    grid = _grid(S, grid)
    targets = np.array([complex(z) * f.value(z) for z in grid])
    solved = membership_solve(F, targets, grid, tol)
    return MultResult(solved.in_space, solved.u, solved.residual, f)


def regular_type_bound(S, beta, grid=None):
    """C_beta = 1/||R_beta|| on H_beta; inf when H_beta is trivial."""
    F = S.kernel
    H = null_space(F)
    basis = vanishing_subspace(F, beta, H)
    if basis.shape[1] == 0:
        return float("inf")

    images = np.column_stack([
        backward_shift(S, lift(F, b, H), beta, grid).output_coeff for b in basis.T
    ])
    complement = H.complement().basis
    op_norm = float(linalg.svdvals(adjoint(complement) @ images)[0])
    return 1.0 / op_norm if op_norm > 0 else float("inf")


def bijection_check(S, z1, z2, grid=None, tol=1e-8):
    """(T - z2 I) R_z1 maps H_z1 onto H_z2 and (T - z1 I) R_z2 undoes it."""
    F = S.kernel
    z1, z2 = complex(z1), complex(z2)
    if z1 == z2:
        raise PreconditionViolation("bijection check needs z1 != z2")

    grid = _grid(S, grid)
    H = null_space(F)
    basis1 = vanishing_subspace(F, z1, H)
    basis2 = vanishing_subspace(F, z2, H)
    if basis1.shape[1] != basis2.shape[1]:
        return BijectionReport(False, basis1.shape[1], basis2.shape[1], 0, float("inf"))

    bijective = True
    images, worst = [], 0.0
    for b in basis1.T:
        f = lift(F, b, H)
        first = backward_shift(S, f, z1, grid)
        g = lift(F, f.reduced + (z1 - z2) * first.output_coeff, H)
        images.append(g.reduced)

        if not first.in_space or not vanishes_at(F, g.coeff, z2, g.norm):
            bijective = False
            continue

        back = backward_shift(S, g, z2, grid)
        h = g.reduced + (z2 - z1) * back.output_coeff
        worst = max(worst, norm(h - f.reduced) / f.norm)
        bijective = bijective and back.in_space

    rank = 0
    if images:
        s = linalg.svdvals(np.column_stack(images))
        rank = int(np.sum(s > 1e-8 * s[0])) if s[0] > 0 else 0

    bijective = bijective and worst <= tol and rank == basis1.shape[1]
    return BijectionReport(bijective, basis1.shape[1], basis2.shape[1], rank, worst)


def _require_real_nodes(S):
    if np.any(np.abs(S.nodes.imag) > 1e-12 * (1.0 + np.abs(S.nodes))):
        raise PreconditionViolation("de branges checks need real nodes")


def debranges_isometry_check(S, beta, grid=None):
    """||(T - conj(beta) I) R_beta f|| = ||f|| on H_beta, for beta in the upper half-plane."""
    beta = complex(beta)
    _require_real_nodes(S)
    if beta.imag <= 0:
        raise PreconditionViolation(f"beta={beta:.6g} is not in the open upper half-plane")

    F = S.kernel
    H = null_space(F)
    basis = vanishing_subspace(F, beta, H)

    worst = 0.0
    for b in basis.T:
        f = lift(F, b, H)
        shifted = backward_shift(S, f, beta, grid)
        image = lift(F, f.reduced + (beta - beta.conjugate()) * shifted.output_coeff, H)
        worst = max(worst, abs(image.norm - f.norm) / f.norm)

    return IsometryDefect(worst <= ISOMETRY_TOL, worst, basis.shape[1])


def simplicity_check(S, points):
    """dimension of the functions in H vanishing at every point (0 when T is simple)."""
    F = S.kernel
    complement = null_space(F).complement().basis
    if complement.shape[1] == 0:
        return 0
    return joint_kernel(scaled_blocks([evaluate(F, z) @ complement for z in points])).dim
