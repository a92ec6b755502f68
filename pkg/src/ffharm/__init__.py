"""Harmonic analysis on quadrics over finite fields: exact transforms and operator-norm experiments."""

__version__ = "0.1.0"

from .errors import FFHarmError, ValidationError
from .field import FiniteField, FieldElement, build_field, field_of_order
from .grid import DUAL, PRIMAL, GridFunction
from .variety import QuadraticForm, Variety, enumerate_variety

__all__ = [
    "__version__", "FFHarmError", "ValidationError", "FiniteField", "FieldElement", "build_field",
    "field_of_order", "DUAL", "PRIMAL", "GridFunction", "QuadraticForm", "Variety", "enumerate_variety",
]
