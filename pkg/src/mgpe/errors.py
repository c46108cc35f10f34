"""Exception hierarchy shared by all modules."""


class MGPEError(Exception):
    """Base class for every error raised by the package."""


class ConfigurationError(MGPEError, ValueError):
    """Invalid grid, potential, parameter or file configuration."""


class PreconditionError(MGPEError, ValueError):
    """An operation was called with inputs violating its precondition."""


class DomainError(MGPEError, ValueError):
    """A parameter lies outside the mathematical domain of the operation."""


class DegenerateInputError(MGPEError, ValueError):
    """Input carries no information to work with (e.g. a zero field)."""


class NonExistenceError(MGPEError):
    """No ground state exists for the requested parameters."""


class StepSizeError(MGPEError, FloatingPointError):
    """A flow step produced non-finite values; retry with a smaller step."""


class ConvergenceError(MGPEError):
    """An iteration failed to meet its tolerance; carries the trace."""

    def __init__(self, message, trace=None, field=None):
        super().__init__(message)
        self.trace = trace
        self.field = field


class ShootingError(MGPEError):
    """Free-boundary shooting failed to bracket or converge."""

    def __init__(self, message, brackets=None):
        super().__init__(message)
        self.brackets = brackets
