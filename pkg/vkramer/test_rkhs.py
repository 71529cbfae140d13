"""tests for the space H_F: norm, reproducing property and membership."""
import numpy as np
import pytest

from vkramer.errors import DimensionMismatch, KernelMismatch
from vkramer.hilbert import norm, random_vectors
from vkramer.kernels import build_matrix_poly, evaluate, make_grid
from vkramer.rkhs import (
    inner_H, isometry_check, lift, membership_solve, null_space, parallelogram_defect,
    pointwise_bound_defect, probe_points, reproducing_check, vanishing_subspace,
)


def _degenerate_kernel():
    """F(z) = (1 + z) diag(1, 0): the second coordinate is invisible."""
    return build_matrix_poly([np.diag([1.0, 0.0]), np.diag([1.0, 0.0])])


def _families(make_zayed, make_rankone, make_resolvent):
    return {
        "zayed": make_zayed(4),
        "rankone": make_rankone(4),
        "resolvent": make_resolvent([1.0, 2.0, 3.0], [2, 1, 1]),
        "matrix_poly": _degenerate_kernel(),
    }


def test_isometry_for_certified_family(make_zayed):
    F = make_zayed(4)
    report = isometry_check(F, probe_points(F))
    assert report.is_isometry and report.consistent
    assert report.joint_kernel_dim == 0 and report.adjoint_range_rank == 4


def test_isometry_fails_with_joint_kernel():
    F = _degenerate_kernel()
    report = isometry_check(F, [0.5, 1.5j, -2.0])
    assert not report.is_isometry
    assert report.joint_kernel_dim == 1 and report.adjoint_range_rank == 1
    assert report.consistent
    with pytest.raises(ValueError):
        isometry_check(F, [])


def test_invisible_direction_has_zero_norm():
    F = _degenerate_kernel()
    assert null_space(F).dim == 1
    assert lift(F, [0, 1]).norm < 1e-14
    assert abs(lift(F, [1, 1]).norm - 1.0) < 1e-14


@pytest.mark.parametrize("family", ["zayed", "rankone", "resolvent", "matrix_poly"])
def test_reproducing_property(family, make_zayed, make_rankone, make_resolvent, rng):
    F = _families(make_zayed, make_rankone, make_resolvent)[family]
    H = null_space(F)
    worst = 0.0
    for _ in range(100):
        u, v = random_vectors(rng, F.dim, 2)
        gamma = complex(*rng.uniform(-2.0, 2.0, 2))
        f = lift(F, u, H)
        scale = 1.0 + norm(f.value(gamma)) * norm(v)
        worst = max(worst, reproducing_check(f, gamma, v, H) / scale)
    assert worst <= 1e-9, f"reproducing residual {worst:.2e}"


def test_norm_identities(make_rankone, rng):
    F = make_rankone(4)
    f, g = (lift(F, u) for u in random_vectors(rng, 4, 2))
    assert parallelogram_defect(f, g) < 1e-12
    assert abs(inner_H(f, f) - f.norm ** 2) < 1e-12
    for z in make_grid(F.nodes):
        assert pointwise_bound_defect(f, z) <= 1e-9 * (1.0 + norm(f.value(z)))


def test_elements_of_different_kernels_do_not_mix(make_zayed):
    f = lift(make_zayed(3), [1, 0, 0])
    g = lift(make_zayed(3), [1, 0, 0])
    with pytest.raises(KernelMismatch):
        inner_H(f, g)
    with pytest.raises(KernelMismatch):
        f + g


def test_lift_checks_dimension(make_zayed):
    with pytest.raises(DimensionMismatch):
        lift(make_zayed(3), [1, 0])


def test_membership_recovers_coefficients(make_rankone, rng):
    F = make_rankone(4)
    grid = make_grid(F.nodes)
    u = random_vectors(rng, 4, 1)[0]
    result = membership_solve(F, [evaluate(F, z) @ u for z in grid], grid)
    assert result.in_space and not result.rank_deficient
    assert norm(result.u - u) <= 1e-8 * norm(u)


def test_membership_rejects_outsiders(make_zayed):
    F = make_zayed(3)
    grid = make_grid(F.nodes)
    constant = np.array([[1.0, 0.0, 0.0]] * len(grid))
    result = membership_solve(F, constant, grid)
    assert not result.in_space
    assert result.residual > 1e-4


def test_membership_on_degenerate_kernel():
    F = _degenerate_kernel()
    grid = make_grid([0.0, 1.0])
    result = membership_solve(F, [evaluate(F, z) @ np.array([2.0, 5.0]) for z in grid], grid)
    assert result.in_space and result.rank_deficient
    assert np.allclose(result.u, [2.0, 0.0])
    with pytest.raises(DimensionMismatch):
        membership_solve(F, np.zeros((3, 2)), grid)


def test_vanishing_subspaces(make_zayed, make_rankone):
    rankone = make_rankone(4)
    assert vanishing_subspace(rankone, 0.3 + 0.8j).shape == (4, 3)

    zayed = make_zayed(4)
    assert vanishing_subspace(zayed, 0.3 + 0.8j).shape[1] == 0
    basis = vanishing_subspace(zayed, zayed.nodes[1])
    assert basis.shape[1] == 3
    assert norm(basis.conj().T @ zayed.basis[:, 1]) < 1e-10


@pytest.mark.parametrize("d", [5, 8])
def test_null_space_ignores_growth_off_the_real_axis(d, make_rankone):
    F = make_rankone(d, basis="standard")
    sizes = [np.linalg.norm(evaluate(F, z), 2) for z in probe_points(F)]
    assert max(sizes) > 1e6 * min(sizes)
    assert null_space(F).dim == 0
    assert isometry_check(F, probe_points(F)).is_isometry

    H = null_space(F)
    for n in range(d):
        assert abs(lift(F, F.basis[:, n], H).norm - 1.0) < 1e-12
