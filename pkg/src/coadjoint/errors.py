"""Exception hierarchy shared by every stage of the pipeline.

The CLI maps these onto exit codes: configuration and domain errors exit 1,
integrity errors exit 2.
"""


class CoadjointError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(CoadjointError, ValueError):
    """Unsupported family, rank, group label or malformed input string."""


class DomainError(CoadjointError, ValueError):
    """Input is well-formed but outside the mathematical domain of an operation."""


class ResourceError(CoadjointError, RuntimeError):
    """A request would exceed a configured size cap."""


class IntegrityError(CoadjointError, ArithmeticError):
    """An internal consistency check failed; indicates a bug, not bad input."""
