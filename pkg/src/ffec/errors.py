"""Exception hierarchy shared by every module."""


class FFECError(Exception):
    """Base class for toolkit errors."""


class DomainError(FFECError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(FFECError):
    """A configured size/precision cap would be exceeded."""


class FieldMismatchError(FFECError, TypeError):
    """Elements of two different finite fields were combined."""


class IsotrivialError(DomainError):
    """The curve has constant j-invariant (rejected by the trace-zero screen)."""


class IndependenceError(FFECError):
    """The Gram determinant interval does not exclude zero."""


class AuditError(FFECError):
    """An internal consistency check failed; indicates a bug."""


class IngestionError(FFECError, ValueError):
    """Malformed external record (CSV row, curve JSON, ...)."""


class NumericError(FFECError):
    """Floating-point root finding or polishing did not converge."""
