"""tests for Q: closed forms, derivatives and the simple-zero certificate."""
import numpy as np
import pytest

from vkramer.derivatives import contour_derivative
from vkramer.errors import KernelBuildError
from vkramer.scalar_entire import (
    POLY_ROOTS, build_q, leave_one_out, pole_guard, poly_from_roots, sin_pi, truncated_product,
)


def test_leave_one_out_products():
    assert np.allclose(leave_one_out([2.0, 3.0, 5.0]), [15.0, 10.0, 6.0])
    assert np.allclose(leave_one_out([0.0, 3.0]), [3.0, 0.0])


def test_sin_pi_derivatives_at_integers():
    Q = sin_pi(np.arange(-3, 4))
    for n in range(-3, 4):
        assert abs(Q(n)) < 1e-14
        assert abs(Q.deriv(n) - (-1) ** n) < 1e-14
        assert abs(Q.second_deriv(n)) < 1e-12


def test_poly_from_roots_small_case():
    Q = poly_from_roots([1, 2])
    assert abs(Q(0) - 2) < 1e-15
    assert abs(Q.deriv(1) + 1) < 1e-15
    assert abs(Q.deriv(2) - 1) < 1e-15
    assert abs(Q.second_deriv(1.7) - 2) < 1e-14


def test_truncated_product_derivative_matches_contour():
    Q = truncated_product([1, -2, 3.5], tail=[6, -7])
    for z in (0.3 + 0.2j, 2.0, -1.1 - 0.5j):
        expected = contour_derivative(Q, z)
        assert abs(Q.deriv(z) - expected) <= 1e-9 * max(1.0, abs(expected))


def test_reg_quotient_is_continuous_at_nodes():
    Q = poly_from_roots([1, 2, 4])
    for n, zn in enumerate(Q.nodes):
        inside = Q.reg_quotient(zn + 1e-8, n)
        outside = Q.reg_quotient(zn + 1e-5, n)
        assert abs(inside - Q.deriv(zn)) <= 1e-7 * abs(Q.deriv(zn))
        assert abs(outside - inside) <= 1e-4 * abs(Q.deriv(zn))


@pytest.mark.parametrize("variant", ["sin_pi", "poly_roots", "trunc_product"])
def test_simple_zero_certificate_at_d16(variant):
    nodes = np.arange(1, 17)
    Q = build_q(variant, nodes)
    Q.check_simple_zeros()
    for value, slope in Q.simple_zero_defects():
        assert value <= 1e-12 and slope >= 1e-6


def test_repeated_and_invalid_nodes_rejected():
    with pytest.raises(KernelBuildError, match="repeated node"):
        poly_from_roots([1, 2, 1])
    with pytest.raises(KernelBuildError, match="not an integer"):
        sin_pi([0.5, 1])
    with pytest.raises(KernelBuildError, match="nonzero"):
        truncated_product([0, 1])
    with pytest.raises(KernelBuildError, match="unknown Q variant"):
        build_q("bessel", [1, 2])


def test_truncation_drops_tail_zeros():
    Q = truncated_product([1, 2], tail=[3, 4, 5], terms=3)
    assert Q.zeros.size == 3
    assert abs(Q(3)) < 1e-14
    assert abs(Q(5)) > 1e-3
    with pytest.raises(KernelBuildError):
        truncated_product([1, 2, 3], terms=2)


def test_zeros_near():
    assert sin_pi([0, 1]).zeros_near(5.0000001, 1e-3) == [5]
    assert sin_pi([0, 1]).zeros_near(5.5, 0.1) == []
    Q = poly_from_roots([1, 2])
    assert Q.variant == POLY_ROOTS
    assert Q.zeros_near(2.05, 0.1) == [2]


@pytest.mark.parametrize("direction", [1, -1, 1j, -1j])
def test_reg_quotient_is_continuous_in_every_direction(direction):
    Q = sin_pi(np.arange(-3, 4))
    for n, zn in enumerate(Q.nodes):
        delta = 0.5 * pole_guard(zn) * direction
        assert abs(Q.reg_quotient(zn + delta, n) - Q.reg_quotient(zn - delta, n)) <= 1e-8
        outside = Q.reg_quotient(zn + 1.01 * pole_guard(zn) * direction, n)
        assert abs(outside - Q.reg_quotient(zn + delta, n)) <= 1e-8
