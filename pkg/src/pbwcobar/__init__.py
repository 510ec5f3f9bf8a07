"""Bar/cobar complexes, Hochschild and Schouten brackets, and PBW algebras
built from Poisson bivectors by hbar-adic rewriting."""

from pbwcobar.errors import (
    ContextError,
    ConventionError,
    DegreeOverflowError,
    GradingError,
    PBWError,
    PreconditionError,
    ResourceError,
    ShapeError,
)
from pbwcobar.tensor import Element, Generator, Scalar

__all__ = [
    "ContextError",
    "ConventionError",
    "DegreeOverflowError",
    "Element",
    "Generator",
    "GradingError",
    "PBWError",
    "PreconditionError",
    "ResourceError",
    "Scalar",
    "ShapeError",
]

__version__ = "0.1.0"
