"""tests for the backward shift, invariance and the multiplication operator."""
import numpy as np
import pytest

from vkramer.errors import PreconditionViolation
from vkramer.hilbert import norm, random_vectors
from vkramer.kernels import build_rank_one_quasi, make_grid
from vkramer.rkhs import GENERIC_PROBES, lift, vanishing_subspace
from vkramer.sampling import certify
from vkramer.scalar_entire import poly_from_roots
from vkramer.shift import (
    backward_shift, bijection_check, debranges_isometry_check, invariance_check, mult_apply,
    regular_type_bound, simplicity_check,
)


def _vanishing_element(S, beta, rng):
    """random f in H_beta."""
    basis = vanishing_subspace(S.kernel, beta)
    return lift(S.kernel, basis @ random_vectors(rng, basis.shape[1], 1)[0])


@pytest.mark.parametrize("beta", [0.4 + 0.7j, -1.6 - 0.3j])
def test_backward_shift_off_nodes(beta, rankone_system, rng):
    S = rankone_system
    for _ in range(20):
        f = _vanishing_element(S, beta, rng)
        result = backward_shift(S, f, beta)
        assert result.in_space and result.residual <= 1e-8
        assert norm(result.solved_coeff - result.output_coeff) <= 1e-7 * norm(result.output_coeff)
        z = 2.2 + 0.9j
        expected = f.value(z) / (z - beta)
        assert norm(lift(S.kernel, result.output_coeff).value(z) - expected) <= 1e-9 * (1.0 + norm(expected))


def test_backward_shift_at_node(rankone_system, rng):
    S = rankone_system
    beta = S.nodes[0]
    assert vanishing_subspace(S.kernel, beta).shape[1] == S.dim - 1
    for _ in range(20):
        f = _vanishing_element(S, beta, rng)
        result = backward_shift(S, f, beta)
        assert result.in_space
        assert norm(result.solved_coeff - result.output_coeff) <= 1e-7 * norm(result.output_coeff)


def test_backward_shift_of_zero(rankone_system):
    zero = lift(rankone_system.kernel, np.zeros(rankone_system.dim))
    result = backward_shift(rankone_system, zero, 0.5j)
    assert result.in_space and norm(result.output_coeff) == 0.0


def test_backward_shift_precondition(rankone_system, rng):
    f = lift(rankone_system.kernel, random_vectors(rng, rankone_system.dim, 1)[0])
    with pytest.raises(PreconditionViolation):
        backward_shift(rankone_system, f, 0.4 + 0.7j)


def test_rank_one_is_shift_invariant(rankone_system):
    S = rankone_system
    betas = [0.5 + 0.5j, S.nodes[1], 1.7 - 0.9j]
    for report in invariance_check(S, betas):
        assert report.all_shifts_in_space, f"beta={report.beta}: {report.max_residual:.2e}"
        assert report.dim_H_beta == S.dim - 1


def test_zayed_fails_invariance_at_nodes(zayed_system):
    S = zayed_system
    for report in invariance_check(S, S.nodes[:2]):
        assert report.dim_H_beta == S.dim - 1
        assert not report.all_shifts_in_space
        assert report.max_residual > 1e-4


def test_invariance_is_vacuous_off_nodes(zayed_system, make_resolvent, rng):
    resolvent = certify(make_resolvent([-1.0, 0.5, 2.0]), rng)
    for S in (zayed_system, resolvent):
        (report,) = invariance_check(S, [0.37 + 0.61j])
        assert report.dim_H_beta == 0 and report.all_shifts_in_space


def test_mult_apply_on_zero(rankone_system):
    result = mult_apply(rankone_system, lift(rankone_system.kernel, np.zeros(rankone_system.dim)))
    assert result.in_domain and norm(result.coeff) < 1e-12


def test_mult_apply_domain_of_rank_one(rankone_system, rng):
    S = rankone_system
    b = random_vectors(rng, S.dim, 1)[0]
    b = b - b.mean()
    f = lift(S.kernel, S.basis @ b)

    result = mult_apply(S, f)
    assert result.in_domain
    assert norm(result.coeff - S.basis @ (S.nodes * b)) <= 1e-7 * norm(b)

    beta = 0.4 + 0.7j
    g = lift(S.kernel, result.shifted_coeff(beta))
    back = backward_shift(S, g, beta)
    assert norm(back.output_coeff - f.reduced) <= 1e-7 * f.norm
    assert g.norm >= regular_type_bound(S, beta) * f.norm * (1.0 - 1e-6)


def test_mult_apply_leaves_zayed_space(zayed_system, rng):
    f = lift(zayed_system.kernel, random_vectors(rng, zayed_system.dim, 1)[0])
    assert not mult_apply(zayed_system, f).in_domain


def test_regular_type_bound(rankone_system, zayed_system, rng):
    S = rankone_system
    beta = -0.8 + 0.6j
    bound = regular_type_bound(S, beta)
    assert 0.0 < bound < float("inf")
    for _ in range(10):
        f = _vanishing_element(S, beta, rng)
        shifted = backward_shift(S, f, beta).output_coeff
        assert bound * norm(shifted) <= f.norm * (1.0 + 1e-9)
    assert regular_type_bound(zayed_system, beta) == float("inf")


def test_bijection(rankone_system, make_resolvent, rng):
    report = bijection_check(rankone_system, 0.5 + 0.5j, -1.3 + 0.4j)
    assert report.bijective
    assert report.image_rank == rankone_system.dim - 1
    assert report.max_roundtrip <= 1e-8

    resolvent = certify(make_resolvent([-1.0, 0.5, 2.0]), rng)
    vacuous = bijection_check(resolvent, 0.5 + 0.5j, -1.3 + 0.4j)
    assert vacuous.bijective and vacuous.dim_z1 == 0

    with pytest.raises(PreconditionViolation):
        bijection_check(rankone_system, 1j, 1j)


@pytest.mark.parametrize("beta", [1j, 1 + 2j, -3 + 0.5j])
def test_debranges_isometry(beta, rankone_system):
    report = debranges_isometry_check(rankone_system, beta)
    assert report.isometric and report.max_norm_defect <= 1e-9
    assert report.dim_H_beta == rankone_system.dim - 1


def test_debranges_isometry_preconditions(rankone_system, rng):
    with pytest.raises(PreconditionViolation):
        debranges_isometry_check(rankone_system, 1 - 1j)
    with pytest.raises(PreconditionViolation):
        debranges_isometry_check(rankone_system, 2.0)

    nodes = [0.0, 1j, 2.0]
    S = certify(build_rank_one_quasi(poly_from_roots(nodes), nodes, np.eye(3)), rng)
    with pytest.raises(PreconditionViolation):
        debranges_isometry_check(S, 1j + 0.5)


def test_simplicity(rankone_system, zayed_system, rng):
    for S in (rankone_system, zayed_system):
        points = list(S.nodes) + list(GENERIC_PROBES[:2])
        assert simplicity_check(S, points) == 0

        re = rng.uniform(S.nodes.real.min() - 1.0, S.nodes.real.max() + 1.0, 20)
        im = rng.choice([-1.0, 1.0], 20) * rng.uniform(0.2, 2.0, 20)
        assert simplicity_check(S, list(re + 1j * im)) == 0


@pytest.mark.parametrize("d, basis", [(5, "standard"), (8, "random")])
def test_debranges_isometry_with_sin_pi(d, basis, make_rankone, rng):
    S = certify(make_rankone(d, basis=basis), rng)
    for beta in (1j, 1 + 2j, -3 + 0.5j):
        report = debranges_isometry_check(S, beta)
        assert report.dim_H_beta == d - 1
        assert report.isometric and report.max_norm_defect <= 1e-9


def test_shift_respects_grid(rankone_system, rng):
    grid = make_grid(rankone_system.nodes, count=12)
    f = _vanishing_element(rankone_system, 0.3j, rng)
    assert backward_shift(rankone_system, f, 0.3j, grid).in_space
