"""Exception hierarchy shared by all modules."""


class RieszError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(RieszError, ValueError):
    """Invalid shape, scenario, or parameter description."""


class DomainError(RieszError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AssemblyError(RieszError):
    """Kernel matrix could not be assembled (e.g. coincident points)."""


class ResourceError(RieszError):
    """A configured size cap would be exceeded."""


class SolverError(RieszError):
    """A quadratic program could not be solved."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PreconditionError(RieszError, ValueError):
    """A theorem hypothesis required by a check does not hold."""
