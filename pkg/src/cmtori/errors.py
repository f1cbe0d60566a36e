"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: domain errors exit 1, resource errors
exit 2.  ``InvariantViolation`` signals a bug, never bad input.
"""

from __future__ import annotations


class CmToriError(Exception):
    """Base class for all library errors."""


class DomainError(CmToriError, ValueError):
    """Input outside the mathematical domain of an operation."""


class DimensionError(DomainError):
    pass


class ParameterError(DomainError):
    pass


class PreconditionError(DomainError):
    pass


class StructureError(DomainError):
    """A filtration level is not a subgroup of its predecessor, etc."""


class PrecisionError(CmToriError):
    """A rounding step left a residual above the accepted threshold."""


class ResourceError(CmToriError):
    """A configured size cap would be exceeded."""


class InvariantViolation(CmToriError, RuntimeError):
    pass
