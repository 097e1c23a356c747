"""Exact computation with piecewise-affine interval maps and degree-one lifts."""

from .numeric import QuadraticSurd, parse_scalar, format_scalar, to_decimal, sqrt, surd
from .maps import PiecewiseAffineMap, compose, iterate, is_constant_slope, from_dots
from .measures import StepDensityMeasure, apply_T, eigen_residual, lebesgue

__version__ = "0.1.0"

__all__ = [
    "QuadraticSurd", "parse_scalar", "format_scalar", "to_decimal", "sqrt", "surd",
    "PiecewiseAffineMap", "compose", "iterate", "is_constant_slope", "from_dots",
    "StepDensityMeasure", "apply_T", "eigen_residual", "lebesgue",
]
