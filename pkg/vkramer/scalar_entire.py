"""scalar entire function Q with simple zeros at the sample nodes."""
from dataclasses import dataclass, field
import math

import numpy as np

from .derivatives import contour_derivative
from .errors import KernelBuildError

SIN_PI = "sin_pi"
POLY_ROOTS = "poly_roots"
TRUNC_PRODUCT = "trunc_product"
VARIANTS = (SIN_PI, POLY_ROOTS, TRUNC_PRODUCT)


def leave_one_out(values):
    """products of all entries but the k-th, without dividing."""
    values = np.asarray(values, dtype=complex)
    n = values.size
    prefix = np.ones(n + 1, dtype=complex)
    suffix = np.ones(n + 1, dtype=complex)
    for k in range(n):
        prefix[k + 1] = prefix[k] * values[k]
        suffix[n - k - 1] = suffix[n - k] * values[n - k - 1]
    return prefix[:n] * suffix[1:]


def pole_guard(node):
    """radius inside which quotients by (z - node) switch to taylor form."""
    return 1e-6 * (1.0 + abs(node))


@dataclass(frozen=True, eq=False)
class ScalarEntire:
    """Q(z) in one of three closed forms.

    nodes are the sampling nodes, in declared order. zeros holds every zero
    the representation knows about (for trunc_product this includes the tail).
    """

    variant: str
    nodes: np.ndarray
    zeros: np.ndarray = field(default=None)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=complex).reshape(-1)
        object.__setattr__(self, "nodes", nodes)
        zeros = nodes if self.zeros is None else np.asarray(self.zeros, dtype=complex).reshape(-1)
        object.__setattr__(self, "zeros", zeros)

    def __call__(self, z):
        z = complex(z)
        if self.variant == SIN_PI:
            return complex(np.sin(np.pi * z) / np.pi)
        if self.variant == POLY_ROOTS:
            return complex(np.prod(z - self.zeros))
        return complex(np.prod(self._factors(z)))

    def _factors(self, z):
        ratio = z / self.zeros
        return (1.0 - ratio) * np.exp(ratio)

    def deriv(self, z):
        """Q'(z)."""
        z = complex(z)
        if self.variant == SIN_PI:
            return complex(np.cos(np.pi * z))
        if self.variant == POLY_ROOTS:
            return complex(np.sum(leave_one_out(z - self.zeros)))
        # genus-1 factor g(z) = (1 - z/w) e^{z/w}, g'(z) = -(z/w^2) e^{z/w}
        ratio = z / self.zeros
        slopes = -(ratio / self.zeros) * np.exp(ratio)
        return complex(np.sum(slopes * leave_one_out(self._factors(z))))

    def second_deriv(self, z):
        """Q''(z)."""
        z = complex(z)
        if self.variant == SIN_PI:
            return complex(-np.pi * np.sin(np.pi * z))
        if self.variant == POLY_ROOTS:
            shifted = z - self.zeros
            total = 0j
            for k in range(shifted.size):
                rest = np.delete(shifted, k)
                total += np.sum(leave_one_out(rest))
            return complex(total)
        return complex(contour_derivative(self.deriv, z))

    def reg_quotient(self, z, n):
        """Q(z)/(z - z_n), extended continuously to z = z_n."""
        z = complex(z)
        zn = self.nodes[n]
        delta = z - zn
        if abs(delta) > pole_guard(zn):
            return self(z) / delta
        return self.deriv(zn) + 0.5 * self.second_deriv(zn) * delta

    def zeros_near(self, z, radius):
        """known zeros of Q within radius of z."""
        z = complex(z)
        if self.variant == SIN_PI:
            if abs(z.imag) >= radius:
                return []
            lo = math.floor(z.real - radius)
            hi = math.ceil(z.real + radius)
            return [complex(k) for k in range(lo, hi + 1) if abs(z - k) < radius]
        return [complex(w) for w in self.zeros if abs(z - w) < radius]

    def simple_zero_defects(self):
        """per node (|Q(z_n)|/scale, |Q'(z_n)|/scale) with a local scale.

        the scale is max |Q| on a circle around z_n of radius half the gap to
        the nearest other zero (capped at 1). a double zero shows up as a
        vanishing second entry.
        """
        defects = []
        for zn in self.nodes:
            others = [w for w in self.zeros_near(zn, 2.0) if abs(w - zn) > pole_guard(zn)]
            gap = min([abs(w - zn) for w in others], default=2.0)
            radius = min(1.0, 0.5 * gap)
            circle = zn + radius * np.exp(2j * np.pi * np.arange(16) / 16)
            scale = max(1e-300, max(abs(self(w)) for w in circle))
            defects.append((abs(self(zn)) / scale, abs(self.deriv(zn)) / scale))
        return defects

    def check_simple_zeros(self):
        """raise KernelBuildError unless every node is a simple zero."""
        for n, (value, slope) in enumerate(self.simple_zero_defects()):
            if value > 1e-12 or slope < 1e-6:
                raise KernelBuildError(
                    f"Q zero-set mismatch at node {n} (z={self.nodes[n]:.6g}): "
                    f"|Q|/scale={value:.2e}, |Q'|/scale={slope:.2e}"
                )


def _check_distinct(nodes):
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    if nodes.size == 0:
        raise KernelBuildError("Q needs at least one node")
    for i in range(nodes.size):
        for j in range(i + 1, nodes.size):
            if abs(nodes[i] - nodes[j]) <= pole_guard(nodes[i]):
                raise KernelBuildError(f"repeated node {nodes[i]:.6g} at indices {i} and {j}")
    return nodes


def sin_pi(nodes):
    """Q(z) = sin(pi z)/pi; nodes must be integers."""
    nodes = _check_distinct(nodes)
    for zn in nodes:
        if abs(zn - round(zn.real)) > 1e-12:
            raise KernelBuildError(f"sin_pi node {zn:.6g} is not an integer")
    return ScalarEntire(SIN_PI, np.round(nodes.real).astype(complex))


def poly_from_roots(nodes):
    """Q(z) = prod (z - z_n)."""
    return ScalarEntire(POLY_ROOTS, _check_distinct(nodes))


def truncated_product(nodes, tail=(), terms=None):
    """genus-1 canonical product over nodes followed by tail zeros.

    terms caps the number of factors (default 4 x number of nodes); zeros
    past the cap are dropped.
    """
    nodes = _check_distinct(nodes)
    zeros = np.concatenate([nodes, np.asarray(tail, dtype=complex).reshape(-1)])
    _check_distinct(zeros)
    if np.any(np.abs(zeros) == 0.0):
        raise KernelBuildError("trunc_product zeros must be nonzero")

    terms = 4 * nodes.size if terms is None else int(terms)
    if terms < nodes.size:
        raise KernelBuildError(f"trunc_product keeps {terms} factors but has {nodes.size} nodes")
    return ScalarEntire(TRUNC_PRODUCT, nodes, zeros[:terms])


def build_q(variant, nodes, tail=(), terms=None):
    """dispatch on the scenario variant name."""
    if variant == SIN_PI:
        return sin_pi(nodes)
    if variant == POLY_ROOTS:
        return poly_from_roots(nodes)
    if variant == TRUNC_PRODUCT:
        return truncated_product(nodes, tail, terms)
    raise KernelBuildError(f"unknown Q variant: {variant}")
