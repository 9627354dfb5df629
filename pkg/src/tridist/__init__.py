"""Random distances associated with equilateral triangles."""

from .distributions import DistanceCase, TriangleDistribution
from .errors import InvalidArgumentError, NumericalFailureError

__version__ = "0.1.0"

__all__ = [
    "DistanceCase",
    "InvalidArgumentError",
    "NumericalFailureError",
    "TriangleDistribution",
    "__version__",
]
