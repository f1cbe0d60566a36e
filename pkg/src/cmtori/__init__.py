"""Exact invariants of CM tori: reciprocity kernels, conductors, cohomology."""

from .errors import (
    CmToriError,
    DomainError,
    InvariantViolation,
    PrecisionError,
    ResourceError,
)

__version__ = "0.1.0"

__all__ = [
    "CmToriError",
    "DomainError",
    "InvariantViolation",
    "PrecisionError",
    "ResourceError",
    "__version__",
]
