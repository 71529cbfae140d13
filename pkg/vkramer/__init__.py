"""kramer sampling and de branges checks for operator-valued kernels."""

__version__ = "0.1.0"
