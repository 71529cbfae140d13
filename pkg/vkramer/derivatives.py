"""derivatives and limits of analytic functions.

all helpers sample the function on a small circle around the point and
use the trapezoidal rule on the cauchy integral, which converges
geometrically for entire functions. works for scalar, vector and matrix
valued functions alike.
"""
import math

import numpy as np

CIRCLE_POINTS = 32


def _default_radius(z):
    return 1e-2 * (1.0 + abs(z))


def _circle(z, radius, points):
    roots = np.exp(2j * np.pi * np.arange(points) / points)
    return roots, z + radius * roots


def contour_derivative(func, z, order=1, radius=None, points=CIRCLE_POINTS):
    """order-th derivative of an analytic func at z."""
    z = complex(z)
    radius = _default_radius(z) if radius is None else radius
    roots, nodes = _circle(z, radius, points)

    total = None
    for w, zeta in zip(roots, nodes):
        term = np.asarray(func(complex(zeta))) * w ** (-order)
        total = term if total is None else total + term

    return total * (math.factorial(order) / (points * radius ** order))


def circle_mean(func, z, radius=None, points=CIRCLE_POINTS):
    """value of an analytic func at z from its mean over a circle.

    used where func(z) itself is a 0/0 form with a removable singularity.
    """
    z = complex(z)
    radius = _default_radius(z) if radius is None else radius
    _, nodes = _circle(z, radius, points)

    total = None
    for zeta in nodes:
        value = np.asarray(func(complex(zeta)))
        total = value if total is None else total + value
    return total / points


def divided_value(func, z, pole, guard=None):
    """func(z)/(z-pole) for func vanishing at pole, continuous across pole."""
    z, pole = complex(z), complex(pole)
    guard = 1e-6 * (1.0 + abs(pole)) if guard is None else guard

    if abs(z - pole) > guard:
        return np.asarray(func(z)) / (z - pole)

    # limit value via the mean over a circle that clears the pole
    radius = _default_radius(pole)
    return circle_mean(lambda w: np.asarray(func(w)) / (w - pole), z, radius)


def cauchy_riemann_residual(func, z, h=1e-6):
    """relative residual of d/dx f + i d/dy f, zero for analytic f."""
    z = complex(z)
    dx = (np.asarray(func(z + h)) - np.asarray(func(z - h))) / (2 * h)
    dy = (np.asarray(func(z + 1j * h)) - np.asarray(func(z - 1j * h))) / (2 * h)

    scale = 1.0 + np.max(np.abs(dx)) + np.max(np.abs(np.asarray(func(z))))
    return float(np.max(np.abs(dx + 1j * dy)) / scale)
