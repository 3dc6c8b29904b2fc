"""Exact computations with Kac-Schwarz operators, big-cell Grassmannian
points and graded dressing."""

from .exact import Q, RatMatrix
from .laurent import Series
from .lie import build_algebra

__version__ = "0.1.0"

__all__ = ["Q", "RatMatrix", "Series", "build_algebra", "__version__"]
