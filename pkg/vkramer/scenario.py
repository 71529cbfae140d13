"""scenario json schema and kernel construction from a scenario."""
import json
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from .debranges import DeBrangesOperator, matrix_poly, scalar_exp
from .errors import ScenarioError
from .hilbert import random_orthonormal_basis
from .kernels import (
    MATRIX_POLY, RANK_ONE_QUASI, RESOLVENT, ZAYED,
    build_matrix_poly, build_rank_one_quasi, build_resolvent, build_zayed,
)
from .scalar_entire import build_q


def _as_pair(value):
    """complex numbers are written as [re, im]; a bare number is real."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return (float(value[0]), float(value[1]))
    raise ValueError(f"expected a number or an [re, im] pair, got {value!r}")


Point = Annotated[Tuple[float, float], BeforeValidator(_as_pair)]
Matrix = List[List[Point]]
Battery = Literal["certify", "reconstruct", "sweep", "invariance", "factorize", "debranges", "shift"]


def to_complex(pair):
    return complex(pair[0], pair[1])


def to_array(points):
    return np.array([to_complex(p) for p in points], dtype=complex)


def to_matrix(rows):
    return np.array([[to_complex(p) for p in row] for row in rows], dtype=complex)


class QSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variant: Literal["sin_pi", "poly_roots", "trunc_product"]
    nodes: Optional[List[Point]] = None
    tail: List[Point] = []
    terms: Optional[int] = Field(default=None, ge=1)


class KernelSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["zayed", "resolvent", "rank_one_quasi", "matrix_poly"]
    basis: Union[Literal["standard", "random"], Matrix] = "standard"
    c: Optional[List[Point]] = None
    multiplicities: Optional[List[Annotated[int, Field(ge=1)]]] = None
    coefficients: Optional[List[Matrix]] = None


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    count: int = Field(default=20, ge=1)
    real_span: Optional[Tuple[float, float]] = None
    circle_radius: Optional[float] = Field(default=None, gt=0)


class EntireSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["scalar_exp", "matrix_poly"]
    tau: float = 0.0
    scale: Point = (1.0, 0.0)
    coefficients: Optional[List[Matrix]] = None

    @model_validator(mode="after")
    def _coefficients_for_poly(self):
        if self.kind == "matrix_poly" and not self.coefficients:
            raise ValueError("matrix_poly needs coefficients")
        return self


class DeBrangesSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    E_plus: EntireSpec
    E_minus: EntireSpec
    dim: Optional[int] = Field(default=None, ge=1)
    beta: Point = (0.0, 1.0)
    beta_star: Optional[Point] = None
    points: List[Point] = []
    probes: Optional[List[Point]] = None

    @model_validator(mode="after")
    def _upper_half_plane(self):
        if self.beta[1] <= 0:
            raise ValueError(f"debranges beta {self.beta} is not in the open upper half-plane")
        return self


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    dimension: Optional[int] = Field(default=None, ge=1)
    Q: QSpec
    kernel: KernelSpec
    grid: GridSpec = GridSpec()
    betas: List[Point] = []
    probes: Optional[List[Point]] = None
    truncations: List[Annotated[int, Field(ge=0)]] = []
    noise: float = Field(default=0.0, ge=0)
    seed: Optional[int] = Field(default=None, ge=0)
    samples: Dict[int, List[Point]] = {}
    debranges: Optional[DeBrangesSpec] = None
    expect: Dict[Battery, Literal["pass", "fail"]] = {}

    @model_validator(mode="after")
    def _consistent_dimension(self):
        spec, d = self.kernel, self.dimension
        count = None if self.Q.nodes is None else len(self.Q.nodes)

        if spec.family == RESOLVENT and spec.multiplicities is not None:
            if count is not None and len(spec.multiplicities) != count:
                raise ValueError(f"{len(spec.multiplicities)} multiplicities for {count} nodes")
            total = sum(spec.multiplicities)
            if d is not None and total != d:
                raise ValueError(f"multiplicities sum to {total}, dimension is {d}")
        elif count is not None and d is not None and count != d:
            raise ValueError(f"{count} nodes in dimension {d}")

        if spec.c is not None and count is not None and len(spec.c) != count:
            raise ValueError(f"{len(spec.c)} sampling coefficients for {count} nodes")
        if spec.family == MATRIX_POLY and not spec.coefficients:
            raise ValueError("matrix_poly kernel needs coefficients")
        return self


def load_scenario(path):
    """read and validate a scenario file; every failure is a ScenarioError."""
    try:
        with open(path) as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from e

    try:
        return Scenario.model_validate(payload)
    except ValidationError as e:
        raise ScenarioError(f"invalid scenario {path}: {e}") from e


def scenario_nodes(scenario, default_dim):
    """declared nodes, or the integers 1..d when the scenario omits them."""
    if scenario.Q.nodes is not None:
        return to_array(scenario.Q.nodes)
    spec = scenario.kernel
    if spec.family == RESOLVENT and spec.multiplicities is not None:
        count = len(spec.multiplicities)
    else:
        count = scenario.dimension or default_dim
    return np.arange(1, count + 1).astype(complex)


def _basis(spec, d, rng):
    if spec.basis == "standard":
        return np.eye(d, dtype=complex)
    if spec.basis == "random":
        return random_orthonormal_basis(rng, d)
    return to_matrix(spec.basis).T


def build_kernel(scenario, rng, default_dim=8):
    """KernelFunction for the scenario; the rng feeds random bases."""
    spec = scenario.kernel
    nodes = scenario_nodes(scenario, default_dim)
    Q = build_q(scenario.Q.variant, nodes, to_array(scenario.Q.tail), scenario.Q.terms)

    if spec.family == RESOLVENT:
        multiplicities = spec.multiplicities or [1] * nodes.size
        basis = _basis(spec, sum(multiplicities), rng)
        offsets = np.cumsum([0] + list(multiplicities))
        spectrum = [(zn, basis[:, offsets[n]:offsets[n + 1]]) for n, zn in enumerate(nodes)]
        return build_resolvent(Q, spectrum)

    basis = _basis(spec, nodes.size, rng)
    if spec.family == ZAYED:
        return build_zayed(Q, nodes, basis)
    if spec.family == RANK_ONE_QUASI:
        c = None if spec.c is None else to_array(spec.c)
        return build_rank_one_quasi(Q, nodes, basis, c)
    return build_matrix_poly([to_matrix(m) for m in spec.coefficients], Q, nodes, basis)


def build_entire(spec, dim):
    if spec.kind == "scalar_exp":
        return scalar_exp(spec.tau, dim, to_complex(spec.scale))
    return matrix_poly([to_matrix(m) for m in spec.coefficients])


def build_debranges(scenario, dim):
    """DeBrangesOperator from the scenario's debranges block; spec.dim overrides dim."""
    spec = scenario.debranges
    dim = spec.dim or dim
    beta_star = None if spec.beta_star is None else to_complex(spec.beta_star)
    return DeBrangesOperator(build_entire(spec.E_plus, dim), build_entire(spec.E_minus, dim), beta_star)
