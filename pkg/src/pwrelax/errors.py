"""Exception hierarchy shared across the package."""


class PwrelaxError(Exception):
    """Base class for all package errors."""


class UsageError(PwrelaxError):
    """An operation was called with arguments outside its contract."""


class ValidationError(PwrelaxError):
    """A value object violates its invariants."""


class SizeError(PwrelaxError):
    """Input too large for an enumeration-based operation."""


class StructureError(PwrelaxError):
    """A family lacks the structural property an operation requires."""


class GeometryError(PwrelaxError):
    """A geometric construction left its valid region."""


class DegeneracyError(GeometryError):
    """A geometric construction hit a numerically degenerate configuration."""
