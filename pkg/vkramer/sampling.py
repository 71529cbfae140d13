"""sampling condition certification and the reconstruction series.

a certified system has F(z_n)u = c_n <u, u_n> u_n at every node, which makes
{F_n = F(.)u_n} an orthonormal basis of H and any f in H recoverable from
its node values.
"""
from dataclasses import dataclass, field
import time

import numpy as np

from .derivatives import circle_mean, contour_derivative
from .errors import CertificationFailure, FactorizationFailure, MissingSample, PreconditionViolation
from .hilbert import adjoint, as_vector, inner, norm, random_vectors
from .kernels import RESOLVENT, evaluate, make_grid, reproducing_kernel, sampling_function
from .rkhs import GENERIC_PROBES, inner_H, lift, null_space
from .scalar_entire import pole_guard
from .shift import invariance_check

CERTIFY_TOL = 1e-10
CERTIFY_TRIALS = 50
FACTOR_TOL = 1e-8
C_CONSISTENCY_TOL = 1e-9
NONZERO_TOL = 1e-12

SAMPLING_CONDITION = "sampling condition F(z_n)u = c_n<u,u_n>u_n"
ADJOINT_CONDITION = "adjoint condition F(z_n)*u_n = conj(c_n)u_n"
BIORTHOGONALITY = "biorthogonality F_n(z_m) = c_n delta_nm u_n"
NONZERO_COEFFICIENT = "nonzero sampling coefficient c_n"


@dataclass(frozen=True, eq=False)
class SamplingSystem:
    kernel: object
    nodes: np.ndarray
    basis: np.ndarray
    coefficients: np.ndarray
    certified: bool = False
    residuals: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.basis.shape[1]


@dataclass
class SampleSet:
    """node values f(z_n) keyed by node index."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, n):
        if n not in self.values:
            raise MissingSample(n)
        return self.values[n]

    def __len__(self):
        return len(self.values)

    def with_overrides(self, overrides):
        merged = dict(self.values)
        merged.update({int(n): as_vector(v) for n, v in overrides.items()})
        return SampleSet(merged)

    def to_records(self):
        return {"samples": [
            {"n": n, "value": [[v.real, v.imag] for v in self.values[n]]}
            for n in sorted(self.values)
        ]}

    @classmethod
    def from_records(cls, payload):
        values = {}
        for item in payload.get("samples", []):
            values[int(item["n"])] = np.array([complex(re, im) for re, im in item["value"]])
        return cls(values)


def take_samples(func, points, noise=0.0, rng=None):
    """samples func at points; optional complex-normal noise of amplitude noise."""
    values = {}
    for n, z in enumerate(points):
        value = np.asarray(func(z), dtype=complex)
        if noise:
            value = value + noise * random_vectors(rng, value.size, 1)[0]
        values[n] = value
    return SampleSet(values)


def certify(F, rng=None, trials=CERTIFY_TRIALS, tol=CERTIFY_TOL):
    """extract c_n = <F(z_n)u_n, u_n> and verify the three node identities."""
    if not F.has_sampling_data:
        raise PreconditionViolation("certify needs a kernel that carries nodes and a basis")
    rng = np.random.default_rng(0) if rng is None else rng

    nodes, U = F.column_nodes, F.basis
    at_nodes = [evaluate(F, z) for z in nodes]
    c = np.array([inner(at_nodes[j] @ U[:, j], U[:, j]) for j in range(U.shape[1])])

    scale = float(np.max(np.abs(c)))
    for j, cj in enumerate(c):
        if scale == 0.0 or abs(cj) <= NONZERO_TOL * scale:
            raise CertificationFailure(NONZERO_COEFFICIENT, j, abs(cj))

    trial = random_vectors(rng, F.dim, trials)
    residuals = {}

    worst = 0.0
    for j, (Fz, uj) in enumerate(zip(at_nodes, U.T)):
        gap = Fz - c[j] * np.outer(uj, uj.conj())
        r = max(norm(gap @ u) / norm(u) for u in trial) / scale
        if r > tol:
            raise CertificationFailure(SAMPLING_CONDITION, j, r)
        worst = max(worst, r)
    residuals[SAMPLING_CONDITION] = worst

    worst = 0.0
    for j, (Fz, uj) in enumerate(zip(at_nodes, U.T)):
        r = norm(adjoint(Fz) @ uj - np.conj(c[j]) * uj) / scale
        if r > tol:
            raise CertificationFailure(ADJOINT_CONDITION, j, r)
        worst = max(worst, r)
    residuals[ADJOINT_CONDITION] = worst

    # columns of at_nodes[m] @ U are F_n(z_m)
    worst = 0.0
    for m, Fz in enumerate(at_nodes):
        expected = np.zeros_like(U)
        expected[:, m] = c[m] * U[:, m]
        r = float(np.max(np.linalg.norm(Fz @ U - expected, axis=0))) / scale
        if r > tol:
            raise CertificationFailure(BIORTHOGONALITY, m, r)
        worst = max(worst, r)
    residuals[BIORTHOGONALITY] = worst

    return SamplingSystem(F, nodes, U, c, True, residuals)


def _require_certified(S):
    if not S.certified:
        raise PreconditionViolation("sampling system is not certified")


def _terms(S, terms):
    return S.dim if terms is None else max(0, min(int(terms), S.dim))


def series_coefficients(S, samples, terms=None):
    """<f(z_n), u_n>/c_n for the first terms nodes, zero beyond."""
    coef = np.zeros(S.dim, dtype=complex)
    for n in range(_terms(S, terms)):
        coef[n] = inner(samples[n], S.basis[:, n]) / S.coefficients[n]
    return coef


def kramer_reconstruct(S, samples, z, terms=None):
    """sum_n <f(z_n), u_n> F_n(z)/c_n."""
    _require_certified(S)
    return evaluate(S.kernel, z) @ (S.basis @ series_coefficients(S, samples, terms))


def kramer_kernel_form(S, samples, z, terms=None, H=None):
    """sum_n <f, K_{z_n}u_n>_H K_{z_n}(z)u_n / ||K_{z_n}u_n||^2.

    <f, K_{z_n}u_n>_H is read off the samples through the reproducing property.
    """
    _require_certified(S)
    F = S.kernel
    H = null_space(F) if H is None else H

    total = np.zeros(F.dim, dtype=complex)
    for n in range(_terms(S, terms)):
        zn, un = S.nodes[n], S.basis[:, n]
        section = lift(F, adjoint(evaluate(F, zn)) @ un, H)
        weight = inner(samples[n], un) / section.norm ** 2
        total = total + weight * (reproducing_kernel(F, zn, z) @ un)
    return total


def sampling_gram(S, H=None):
    """gram matrix of the F_n under inner_H."""
    F = S.kernel
    H = null_space(F) if H is None else H
    sections = [lift(F, u, H) for u in S.basis.T]
    return np.array([[inner_H(g, f) for g in sections] for f in sections])


def coefficient_identity_defect(S, f):
    """max_n |<f, F_n>_H - <f(z_n), u_n>/c_n|."""
    H = null_space(S.kernel)
    defects = []
    for n, un in enumerate(S.basis.T):
        lhs = inner_H(f, lift(S.kernel, un, H))
        rhs = inner(f.value(S.nodes[n]), un) / S.coefficients[n]
        defects.append(abs(lhs - rhs))
    return max(defects)


@dataclass(frozen=True, eq=False)
class ExtractedVector:
    """A(z) = (z - z_1) F_1(z)/Q(z), continued across the zeros of Q."""

    kernel: object
    Q: object

    def _quotient(self, z):
        return sampling_function(self.kernel, 0, z) / self.Q.reg_quotient(z, 0)

    def __call__(self, z):
        z = complex(z)
        first = self.Q.nodes[0]
        for zeta in self.Q.zeros_near(z, pole_guard(z)):
            if abs(zeta - first) > pole_guard(first):
                return circle_mean(self._quotient, z, 1e-2 * (1.0 + abs(zeta)))
        return self._quotient(z)


@dataclass(frozen=True, eq=False)
class Factorization:
    Q: object
    A: ExtractedVector
    a: np.ndarray
    A_at_nodes: np.ndarray
    residual: float
    c_residual: float


def factorization_probes(S):
    """nodes plus two generic points scaled to the node spread."""
    scale = 1.0 + float(np.max(np.abs(S.nodes)))
    return [complex(z) for z in S.nodes] + [scale * p for p in GENERIC_PROBES[:2]]


def extract_factorization(S, probes=None, grid=None):
    """recover (Q, A, a_n) with (z - z_n)F_n(z) = a_n Q(z) A(z) and a_1 = 1."""
    _require_certified(S)
    F, Q = S.kernel, S.kernel.Q
    if Q is None:
        raise FactorizationFailure("kernel carries no scalar factor Q")

    grid = make_grid(S.nodes) if grid is None else grid
    probes = factorization_probes(S) if probes is None else probes

    for report in invariance_check(S, probes, grid):
        if not report.all_shifts_in_space:
            raise FactorizationFailure("R_beta H_beta is not contained in H", report.beta, report.max_residual)

    A = ExtractedVector(F, Q)
    z1, u1, c1 = S.nodes[0], S.basis[:, 0], S.coefficients[0]
    a = np.ones(S.dim, dtype=complex)
    for n in range(1, S.dim):
        slope = contour_derivative(lambda w: sampling_function(F, n, w), z1)
        a[n] = (z1 - S.nodes[n]) * inner(slope, u1) / c1

    worst, worst_point = 0.0, None
    for n in range(S.dim):
        lhs = [(z - S.nodes[n]) * sampling_function(F, n, z) for z in grid]
        rhs = [a[n] * Q(z) * A(z) for z in grid]
        scale = max(1e-300, max(norm(v) for v in lhs))
        for z, left, right in zip(grid, lhs, rhs):
            r = norm(left - right) / scale
            if r > worst:
                worst, worst_point = r, z
    if worst > FACTOR_TOL:
        raise FactorizationFailure("(z - z_n)F_n(z) = a_n Q(z) A(z) fails", worst_point, worst)

    small = np.abs(a) <= NONZERO_TOL * np.max(np.abs(a))
    if np.any(small):
        n = int(np.argmax(small))
        raise FactorizationFailure(f"coefficient a_{n} vanishes", S.nodes[n], abs(a[n]))

    A_at_nodes = np.array([inner(A(zn), un) for zn, un in zip(S.nodes, S.basis.T)])
    for n, (zn, value) in enumerate(zip(S.nodes, A_at_nodes)):
        if abs(value) <= NONZERO_TOL * norm(A(zn)):
            raise FactorizationFailure(f"<A(z_{n}), u_{n}> vanishes", zn, abs(value))

    slopes = np.array([Q.deriv(zn) for zn in S.nodes])
    c_gap = np.abs(a * slopes * A_at_nodes - S.coefficients) / np.abs(S.coefficients)
    c_residual = float(np.max(c_gap))
    if c_residual > C_CONSISTENCY_TOL:
        n = int(np.argmax(c_gap))
        raise FactorizationFailure("c_n = a_n Q'(z_n)<A(z_n), u_n> fails", S.nodes[n], c_residual)

    return Factorization(Q, A, a, A_at_nodes, worst, c_residual)


def quasi_lagrange_reconstruct(fact, S, samples, z, terms=None):
    """sum_n <f(z_n), u_n> Q(z)/((z - z_n)Q'(z_n)) A(z)/<A(z_n), u_n>."""
    Q = fact.Q
    weights = np.zeros(S.dim, dtype=complex)
    for n in range(_terms(S, terms)):
        lagrange = Q.reg_quotient(z, n) / Q.deriv(S.nodes[n])
        weights[n] = inner(samples[n], S.basis[:, n]) * lagrange / fact.A_at_nodes[n]
    return np.sum(weights) * fact.A(z)


def lagrange_reconstruct(F, samples, z, terms=None):
    """sum_n Q(z)/((z - z_n)Q'(z_n)) f(z_n) over the distinct resolvent nodes."""
    if F.family != RESOLVENT:
        raise PreconditionViolation(f"lagrange series needs the resolvent family, got {F.family}")

    count = F.nodes.size if terms is None else max(0, min(int(terms), F.nodes.size))
    total = np.zeros(F.dim, dtype=complex)
    for n in range(count):
        lagrange = F.Q.reg_quotient(z, n) / F.Q.deriv(F.nodes[n])
        total = total + lagrange * samples[n]
    return total


@dataclass
class SweepRow:
    N: int
    max_error: float
    mean_error: float
    runtime_ms: float = 0.0


def convergence_sweep(S, f, truncations, grid=None, record_timings=False, samples=None):
    """truncated kramer series against direct evaluation on the grid.

    errors are relative to max(1, max ||f|| on the grid).
    """
    _require_certified(S)
    grid = make_grid(S.nodes) if grid is None else grid
    samples = take_samples(f.value, S.nodes) if samples is None else samples
    exact = [f.value(z) for z in grid]
    scale = max(1.0, max(norm(v) for v in exact))

    rows = []
    for N in truncations:
        started = time.perf_counter()
        errors = [norm(kramer_reconstruct(S, samples, z, N) - v) / scale for z, v in zip(grid, exact)]
        elapsed = (time.perf_counter() - started) * 1e3 if record_timings else 0.0
        rows.append(SweepRow(int(N), max(errors), float(np.mean(errors)), elapsed))
    return rows


def is_monotone(rows, slack=1e-12):
    """max_error nonincreasing in N up to slack."""
    ordered = sorted(rows, key=lambda r: r.N)
    return all(b.max_error <= a.max_error + slack for a, b in zip(ordered, ordered[1:]))


def zero_set_margin(S, n, grid, clearance=0.1):
    """min ||F_n(z)|| over grid points away from the other zeros of Q, relative to max ||F_n||."""
    F, Q = S.kernel, S.kernel.Q
    values = [(z, norm(sampling_function(F, n, z))) for z in grid]
    scale = max(v for _, v in values)
    far = [
        v for z, v in values
        if all(abs(w - S.nodes[n]) <= 1e-9 for w in Q.zeros_near(z, clearance))
    ]
    return min(far, default=scale) / scale if scale > 0 else 0.0
