"""exceptions raised by the vkramer library."""


class VkramerError(Exception):
    """base error."""


class DimensionMismatch(VkramerError, ValueError):
    """vectors or operators of incompatible sizes."""


class KernelBuildError(VkramerError, ValueError):
    """kernel family inputs are inconsistent."""


class KernelMismatch(VkramerError, ValueError):
    """two rkhs elements belong to different kernels."""


class PreconditionViolation(VkramerError, ValueError):
    """operation called outside its domain."""


class MissingSample(VkramerError, KeyError):
    """sample set lacks a node value needed by a series."""

    def __init__(self, index):
        super().__init__(f"missing sample for node index {index}")
        self.index = index

    def __str__(self):
        return self.args[0]


class ScenarioError(VkramerError, ValueError):
    """scenario file failed schema validation."""


class CertificationFailure(VkramerError):
    """sampling condition identity violated."""

    def __init__(self, identity, node, residual):
        super().__init__(
            f"{identity} violated at node {node}: residual {residual:.3e}"
        )
        self.identity = identity
        self.node = node
        self.residual = residual


class FactorizationFailure(VkramerError):
    """no (Q, A, a_n) factorization reproduces the sampling functions."""

    def __init__(self, reason, grid_point=None, residual=float("nan")):
        where = "" if grid_point is None else f" at z={complex(grid_point):.6g}"
        super().__init__(f"{reason}{where}: residual {residual:.3e}")
        self.reason = reason
        self.grid_point = grid_point
        self.residual = residual
