"""de branges kernels from a pair (E_-, E_+) and the space characterization battery."""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import KernelBuildError, PreconditionViolation
from .hilbert import adjoint, as_operator
from .kernels import evaluate, reproducing_kernel
from .shift import debranges_isometry_check, invariance_check

SCALAR_EXP = "scalar_exp"
MATRIX_POLY = "matrix_poly"

SELF_ADJOINT_TOL = 1e-10
PSD_TOL = 1e-10
COND_LIMIT = 1e12

PASS, FAIL, ABSTAIN, NOT_COMPUTED = "pass", "fail", "abstain", "not computed"


@dataclass(frozen=True, eq=False)
class EntireOperator:
    """E(z) = scale e^{i tau z} I_d, or a matrix polynomial sum_k C_k z^k."""

    kind: str
    dim: int
    tau: float = 0.0
    scale: complex = 1.0
    coefficients: tuple = ()

    def __call__(self, z):
        return self.deriv(z, 0)

    def deriv(self, z, order=1):
        """order-th derivative, in closed form for both kinds."""
        z = complex(z)
        if self.kind == SCALAR_EXP:
            value = self.scale * (1j * self.tau) ** order * np.exp(1j * self.tau * z)
            return value * np.eye(self.dim, dtype=complex)

        result = np.zeros((self.dim, self.dim), dtype=complex)
        for k in range(len(self.coefficients) - 1, order - 1, -1):
            falling = float(np.prod(np.arange(k - order + 1, k + 1))) if order else 1.0
            result = result * z + falling * self.coefficients[k]
        return result


def scalar_exp(tau, dim=1, scale=1.0):
    return EntireOperator(SCALAR_EXP, int(dim), float(tau), complex(scale))


def matrix_poly(coefficients):
    coefficients = tuple(as_operator(c) for c in coefficients)
    if not coefficients:
        raise KernelBuildError("matrix polynomial needs at least one coefficient")
    d = coefficients[0].shape[0]
    if any(c.shape != (d, d) for c in coefficients):
        raise KernelBuildError("matrix polynomial coefficients differ in shape")
    return EntireOperator(MATRIX_POLY, d, coefficients=coefficients)


@dataclass(frozen=True)
class RhoFactor:
    gamma: complex

    def __call__(self, z):
        return -2j * np.pi * (complex(z) - np.conj(self.gamma))


@dataclass(frozen=True, eq=False)
class DeBrangesOperator:
    """the pair (E_-, E_+), with an optional beta* for the B_beta variant."""

    E_plus: EntireOperator
    E_minus: EntireOperator
    beta_star: complex = None

    def __post_init__(self):
        if self.E_plus.dim != self.E_minus.dim:
            raise KernelBuildError(f"E_plus is {self.E_plus.dim}-dimensional, E_minus {self.E_minus.dim}")
        if self.beta_star is None:
            return

        beta = complex(self.beta_star)
        if beta.imag <= 0:
            raise PreconditionViolation(f"beta*={beta:.6g} is not in the open upper half-plane")
        for name, value in (("E_plus(beta)", self.E_plus(beta)), ("E_minus(conj beta)", self.E_minus(beta.conjugate()))):
            gap = np.max(np.abs(value - adjoint(value)))
            if gap > SELF_ADJOINT_TOL * max(1.0, np.max(np.abs(value))):
                raise KernelBuildError(f"{name} is not self-adjoint: defect {gap:.3e}")

    @property
    def dim(self):
        return self.E_plus.dim

    def invertible_at(self, points, cond_limit=COND_LIMIT):
        """points where both E_plus and E_minus are numerically invertible."""
        return [
            z for z in points
            if np.linalg.cond(self.E_plus(z)) < cond_limit and np.linalg.cond(self.E_minus(z)) < cond_limit
        ]

    def require_invertible(self, points, cond_limit=COND_LIMIT):
        if not self.invertible_at(points, cond_limit):
            raise KernelBuildError("E_plus and E_minus are not both invertible at any probe point")


def db_kernel(op, gamma, z):
    """(E_+(z)E_+(gamma)* - E_-(z)E_-(gamma)*)/rho_gamma(z).

    within 1e-6(1 + |conj gamma|) of conj gamma the numerator is replaced by
    its first two taylor terms there, so the quotient is continuous.
    """
    gamma, z = complex(gamma), complex(z)
    plus_g = adjoint(op.E_plus(gamma))
    minus_g = adjoint(op.E_minus(gamma))
    center = gamma.conjugate()
    delta = z - center

    if abs(delta) > 1e-6 * (1.0 + abs(center)):
        numerator = op.E_plus(z) @ plus_g - op.E_minus(z) @ minus_g
        return numerator / RhoFactor(gamma)(z)

    slope = op.E_plus.deriv(center) @ plus_g - op.E_minus.deriv(center) @ minus_g
    curve = op.E_plus.deriv(center, 2) @ plus_g - op.E_minus.deriv(center, 2) @ minus_g
    return (slope + 0.5 * curve * delta) / (-2j * np.pi)


@dataclass
class PositivityReport:
    min_eig: float
    max_eig: float
    psd: bool


def gram_matrix(op, points, directions=None):
    """block gram [<K_{gamma_j}(gamma_i) v_b, v_a>] over points and directions."""
    V = np.eye(op.dim, dtype=complex) if directions is None else np.column_stack(directions)
    blocks = [[adjoint(V) @ db_kernel(op, gj, gi) @ V for gj in points] for gi in points]
    return np.block(blocks)


def positivity_check(op, points, directions=None, tol=PSD_TOL):
    """minimal eigenvalue of the hermitian part of the block gram matrix."""
    if len(points) < 2:
        raise PreconditionViolation("positivity check needs at least two points")
    G = gram_matrix(op, points, directions)
    eigs = linalg.eigvalsh(0.5 * (G + adjoint(G)))
    spread = max(float(np.max(np.abs(eigs))), 1e-300)
    return PositivityReport(float(eigs[0]), float(eigs[-1]), bool(eigs[0] >= -tol * spread))


def sinc_pair(dim=1):
    """E_+(z) = e^{-i pi z}, E_-(z) = e^{i pi z}: the paley-wiener kernel."""
    return DeBrangesOperator(scalar_exp(-np.pi, dim), scalar_exp(np.pi, dim))


def scalar_trace_kernel(F, gamma, z):
    """trace of F(z)F(gamma)*, the scalar kernel of a diagonal system."""
    return complex(np.trace(reproducing_kernel(F, gamma, z)))


def sinc_cross_check(op, F, pairs):
    """max |db_kernel[0, 0] - trace K_gamma(z)| over (gamma, z) pairs."""
    return max(abs(db_kernel(op, g, z)[0, 0] - scalar_trace_kernel(F, g, z)) for g, z in pairs)


@dataclass
class ConditionEntry:
    name: str
    status: str
    value: float = float("nan")


@dataclass
class BatteryReport:
    beta: complex
    cond_F_beta: float
    cond_F_beta_bar: float
    entries: list = field(default_factory=list)
    verdict: str = ABSTAIN

    def status(self, name):
        return next(e.status for e in self.entries if e.name == name)


INVARIANCE = "shift invariance at beta, conj beta and probes"
ISOMETRY = "(T - conj beta I) R_beta isometric"
KERNEL_INVERTIBLE = "K_beta(beta) and K_conj beta(conj beta) invertible"
INNER_FUNCTION = "chi in S^in and S_*^in"
FREDHOLM = "T - zI fredholm off M"


def _cond(m):
    s = linalg.svdvals(m)
    return float("inf") if s[-1] == 0.0 else float(s[0] / s[-1])


def space_equality_battery(S, beta, probes=None, grid=None, cond_limit=COND_LIMIT):
    """run the characterization conditions for H = B_beta(E) on a certified system.

    probes default to the nodes. the verdict is "inconsistent" when the
    invariance or isometry condition fails, "abstain" when F or the kernel at
    beta or conj beta is numerically singular, else "consistent".
    """
    F = S.kernel
    beta = complex(beta)
    beta_bar = beta.conjugate()
    probes = [complex(z) for z in S.nodes] if probes is None else list(probes)

    cond_beta = _cond(evaluate(F, beta))
    cond_beta_bar = _cond(evaluate(F, beta_bar))
    report = BatteryReport(beta, cond_beta, cond_beta_bar)

    reports = invariance_check(S, [beta, beta_bar] + probes, grid)
    invariant = all(r.all_shifts_in_space for r in reports)
    report.entries.append(ConditionEntry(
        INVARIANCE, PASS if invariant else FAIL, max(r.max_residual for r in reports)
    ))

    isometry = debranges_isometry_check(S, beta, grid)
    report.entries.append(ConditionEntry(
        ISOMETRY, PASS if isometry.isometric else FAIL, isometry.max_norm_defect
    ))

    kernel_cond = max(
        _cond(reproducing_kernel(F, beta, beta)), _cond(reproducing_kernel(F, beta_bar, beta_bar))
    )
    report.entries.append(ConditionEntry(
        KERNEL_INVERTIBLE, PASS if kernel_cond <= cond_limit else ABSTAIN, kernel_cond
    ))
    report.entries.append(ConditionEntry(INNER_FUNCTION, NOT_COMPUTED))
    report.entries.append(ConditionEntry(FREDHOLM, NOT_COMPUTED))

    if not (invariant and isometry.isometric):
        report.verdict = "inconsistent"
    elif max(cond_beta, cond_beta_bar, kernel_cond) > cond_limit:
        report.verdict = ABSTAIN
    else:
        report.verdict = "consistent"
    return report
