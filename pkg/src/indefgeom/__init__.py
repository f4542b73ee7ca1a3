"""Curvature of indefinite metrics on a single chart, and the structural
and preservation checks built on it."""

from .curvature import CurvatureBundle, bundle_at
from .diffeo import DiffeoMap
from .errors import GeometryError, InputError, NumericalError
from .geometry import ChartManifold, ComplexStructure

__version__ = "0.1.0"
SCHEMA_VERSION = 1

__all__ = [
    "ChartManifold",
    "ComplexStructure",
    "CurvatureBundle",
    "DiffeoMap",
    "GeometryError",
    "InputError",
    "NumericalError",
    "SCHEMA_VERSION",
    "bundle_at",
]
