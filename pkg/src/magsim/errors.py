"""Exception hierarchy shared across the package."""


class MagsimError(Exception):
    """Base class for all package errors."""


class ParameterError(MagsimError, ValueError):
    """Invalid, missing or inconsistent physical parameters."""


class SingularityError(MagsimError, ArithmeticError):
    """A closed-form expression hit a vanishing denominator."""


class ConvergenceError(MagsimError, RuntimeError):
    """An iterative procedure stopped before meeting its tolerance."""

    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual


class InstabilityError(MagsimError, RuntimeError):
    """The linearized dynamics has no steady state."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class UndefinedQuantityError(MagsimError, ValueError):
    """A requested observable is undefined at this operating point."""


class ConfigError(ParameterError):
    """Malformed or schema-violating run configuration."""
