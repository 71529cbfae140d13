"""shared fixtures: seeded generators and the four kernel families."""
import numpy as np
import pytest

from vkramer.hilbert import random_orthonormal_basis
from vkramer.kernels import build_rank_one_quasi, build_resolvent, build_zayed
from vkramer.sampling import certify
from vkramer.scalar_entire import poly_from_roots, sin_pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def make_zayed(rng):
    """zayed kernel on nodes 1..d with Q = prod (z - n)."""
    def build(d, basis="random"):
        nodes = np.arange(1, d + 1)
        U = random_orthonormal_basis(rng, d) if basis == "random" else np.eye(d)
        return build_zayed(poly_from_roots(nodes), nodes, U)
    return build


@pytest.fixture
def make_rankone(rng):
    """rank-one quasi lagrange kernel on centered integer nodes with Q = sin(pi z)/pi."""
    def build(d, c=None, basis="random"):
        nodes = np.arange(d) - d // 2
        U = random_orthonormal_basis(rng, d) if basis == "random" else np.eye(d)
        return build_rank_one_quasi(sin_pi(nodes), nodes, U, c)
    return build


@pytest.fixture
def make_resolvent(rng):
    """resolvent kernel Q(z)(zI - T)^{-1} with T given by nodes and multiplicities."""
    def build(nodes, multiplicities=None):
        multiplicities = multiplicities or [1] * len(nodes)
        U = random_orthonormal_basis(rng, sum(multiplicities))
        offsets = np.cumsum([0] + list(multiplicities))
        spectrum = [(zn, U[:, offsets[n]:offsets[n + 1]]) for n, zn in enumerate(nodes)]
        return build_resolvent(poly_from_roots(nodes), spectrum)
    return build


@pytest.fixture
def rankone_system(make_rankone, rng):
    return certify(make_rankone(4), rng)


@pytest.fixture
def zayed_system(make_zayed, rng):
    return certify(make_zayed(4), rng)
