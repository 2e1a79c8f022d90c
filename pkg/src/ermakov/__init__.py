"""Generalized Ermakov systems: integration, invariants, Lie symmetry and reduction to quadratures."""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
