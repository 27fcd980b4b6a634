"""Generalized Alomari quadrature: Peano kernels, error bounds and a verification harness."""

from .funcspace import Interval
from .rules import RuleParams, error_functional

__all__ = ["Interval", "RuleParams", "error_functional"]
__version__ = "0.1.0"
