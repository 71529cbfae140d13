"""tests for certification, the kramer series and the quasi-lagrange factorization."""
import numpy as np
import pytest

from vkramer.errors import CertificationFailure, FactorizationFailure, MissingSample, PreconditionViolation
from vkramer.hilbert import norm, random_vectors
from vkramer.kernels import build_matrix_poly, build_resolvent, make_grid
from vkramer.rkhs import lift
from vkramer.sampling import (
    SAMPLING_CONDITION, SampleSet, certify, coefficient_identity_defect, convergence_sweep,
    extract_factorization, is_monotone, kramer_kernel_form, kramer_reconstruct, lagrange_reconstruct,
    quasi_lagrange_reconstruct, sampling_gram, take_samples, zero_set_margin,
)
from vkramer.scalar_entire import poly_from_roots


def _relative(a, b):
    return norm(a - b) / max(1.0, norm(b))


@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_certify_zayed(d, make_zayed, rng):
    S = certify(make_zayed(d), rng)
    assert S.certified
    expected = np.array([S.kernel.Q.deriv(z) for z in S.nodes])
    assert np.max(np.abs(S.coefficients - expected)) <= 1e-10 * np.max(np.abs(expected))
    assert max(S.residuals.values()) <= 1e-10


@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_certify_rank_one_with_given_coefficients(d, make_rankone, rng):
    c = 1.0 + rng.uniform(size=d) + 1j * rng.uniform(size=d)
    S = certify(make_rankone(d, c=c), rng)
    assert np.max(np.abs(S.coefficients - c)) <= 1e-10 * np.max(np.abs(c))


def test_multiplicity_breaks_sampling_condition(make_resolvent, rng):
    with pytest.raises(CertificationFailure) as failure:
        certify(make_resolvent([1.0, 2.0, 3.0], [2, 1, 1]), rng)
    assert failure.value.identity == SAMPLING_CONDITION
    assert failure.value.residual > 1e-10


def test_certify_needs_nodes():
    with pytest.raises(PreconditionViolation):
        certify(build_matrix_poly([np.eye(2)]))


def test_sampling_functions_are_orthonormal(rankone_system, zayed_system):
    for S in (rankone_system, zayed_system):
        assert np.max(np.abs(sampling_gram(S) - np.eye(S.dim))) < 1e-12


def test_coefficient_identity(zayed_system, rng):
    S = zayed_system
    for u in random_vectors(rng, S.dim, 50):
        f = lift(S.kernel, u)
        assert coefficient_identity_defect(S, f) <= 1e-10 * (1.0 + norm(u))


def test_kramer_series_is_exact(make_zayed, rng):
    S = certify(make_zayed(8), rng)
    grid = make_grid(S.nodes)
    for u in random_vectors(rng, 8, 20):
        f = lift(S.kernel, u)
        samples = take_samples(f.value, S.nodes)
        for z in grid:
            assert _relative(kramer_reconstruct(S, samples, z), f.value(z)) <= 1e-9
        for n, zn in enumerate(S.nodes):
            assert _relative(kramer_reconstruct(S, samples, zn), samples[n]) <= 1e-10


def test_kramer_series_on_sections_and_zero(rankone_system):
    S = rankone_system
    first = lift(S.kernel, S.basis[:, 0])
    samples = take_samples(first.value, S.nodes)
    z = 0.3 - 0.7j
    assert _relative(kramer_reconstruct(S, samples, z), first.value(z)) <= 1e-12

    zero = SampleSet({n: np.zeros(S.dim, dtype=complex) for n in range(S.dim)})
    assert norm(kramer_reconstruct(S, zero, z)) == 0.0


def test_kernel_form_agrees_with_kramer(rankone_system, rng):
    S = rankone_system
    f = lift(S.kernel, random_vectors(rng, S.dim, 1)[0])
    samples = take_samples(f.value, S.nodes)
    for z in make_grid(S.nodes):
        assert _relative(kramer_kernel_form(S, samples, z), kramer_reconstruct(S, samples, z)) <= 1e-10


def test_missing_sample(zayed_system):
    partial = SampleSet({0: np.ones(zayed_system.dim)})
    with pytest.raises(MissingSample) as missing:
        kramer_reconstruct(zayed_system, partial, 0.5j)
    assert missing.value.index == 1
    # a truncated series only touches the samples it sums
    kramer_reconstruct(zayed_system, partial, 0.5j, terms=1)


def test_sample_set_records(rng):
    samples = take_samples(lambda z: np.array([z, 2 * z]), [1.0, 1j])
    again = SampleSet.from_records(samples.to_records())
    assert len(again) == 2
    assert np.allclose(again[1], [1j, 2j])
    assert np.allclose(again.with_overrides({0: [0, 0]})[0], [0, 0])


def test_rank_one_factorization(make_rankone, rng):
    S = certify(make_rankone(6), rng)
    fact = extract_factorization(S)
    assert np.max(np.abs(fact.a - 1.0)) <= 1e-9
    assert fact.c_residual <= 1e-9
    assert fact.residual <= 1e-8

    f = lift(S.kernel, random_vectors(rng, 6, 1)[0])
    samples = take_samples(f.value, S.nodes)
    for z in make_grid(S.nodes):
        quasi = quasi_lagrange_reconstruct(fact, S, samples, z)
        assert _relative(quasi, kramer_reconstruct(S, samples, z)) <= 1e-8


def test_factorization_fails_without_invariance(zayed_system, make_resolvent, rng):
    with pytest.raises(FactorizationFailure):
        extract_factorization(zayed_system)
    with pytest.raises(FactorizationFailure):
        extract_factorization(certify(make_resolvent([-1.0, 0.5, 2.0]), rng))


def test_lagrange_small_example():
    eye = np.eye(2, dtype=complex)
    F = build_resolvent(poly_from_roots([1, 2]), [(1, eye[:, [0]]), (2, eye[:, [1]])])
    samples = SampleSet({0: np.array([-1.0, 0.0]), 1: np.array([0.0, 1.0])})
    assert norm(lagrange_reconstruct(F, samples, 3) - np.array([1.0, 2.0])) <= 1e-12


def test_lagrange_with_multiplicity(make_resolvent, rng):
    F = make_resolvent([1.0, 2.0, 3.0], [2, 1, 1])
    f = lift(F, random_vectors(rng, 4, 1)[0])
    samples = take_samples(f.value, F.nodes)
    for z in make_grid(F.nodes):
        assert _relative(lagrange_reconstruct(F, samples, z), f.value(z)) <= 1e-10


def test_lagrange_needs_resolvent(zayed_system):
    with pytest.raises(PreconditionViolation):
        lagrange_reconstruct(zayed_system.kernel, SampleSet(), 0.0)


def test_sweep_truncation(zayed_system):
    S = zayed_system
    u = S.basis[:, 0] + 2 * S.basis[:, 1] - S.basis[:, 2]
    f = lift(S.kernel, u)
    grid = make_grid(S.nodes)
    rows = convergence_sweep(S, f, [0, 1, 2, 3, 4], grid)

    top = max(norm(f.value(z)) for z in grid)
    assert rows[0].max_error == pytest.approx(top / max(1.0, top), rel=1e-12)
    assert all(row.max_error <= 1e-10 for row in rows if row.N >= 3)
    assert all(row.runtime_ms == 0.0 for row in rows)
    assert is_monotone(rows)


def test_sweep_monotone_for_random_element(make_zayed, rng):
    S = certify(make_zayed(8), rng)
    f = lift(S.kernel, random_vectors(rng, 8, 1)[0])
    rows = convergence_sweep(S, f, [0, 1, 2, 4, 8])
    assert is_monotone(rows)
    assert rows[-1].max_error <= 1e-9


def test_zero_set_margin(zayed_system):
    grid = make_grid(zayed_system.nodes)
    for n in range(zayed_system.dim):
        assert zero_set_margin(zayed_system, n, grid) > 1e-6


def test_zero_set_margin_of_factorizable_system(rankone_system):
    S = rankone_system
    extract_factorization(S)
    grid = make_grid(S.nodes, circle_radius=1.0)
    for n in range(S.dim):
        assert zero_set_margin(S, n, grid) > 1e-6


@pytest.mark.parametrize("d", [5, 8])
def test_sin_pi_sampling_functions_are_orthonormal(d, make_rankone, rng):
    S = certify(make_rankone(d), rng)
    assert np.max(np.abs(sampling_gram(S) - np.eye(d))) < 1e-12

    f = lift(S.kernel, random_vectors(rng, d, 1)[0])
    samples = take_samples(f.value, S.nodes)
    for z in make_grid(S.nodes):
        assert _relative(kramer_kernel_form(S, samples, z), kramer_reconstruct(S, samples, z)) <= 1e-8
