"""The lagrangefsi exceptions. License: GPL-3.0"""

from typing import Optional


class ConfigError(ValueError):
    """Base class of every configuration problem."""


class ConfigSyntaxError(ConfigError):

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigValidationError(ConfigError):

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(message)


class MeshError(ValueError):
    pass


class PhaseMismatchError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


class NotSPDError(SolverError, ValueError):
    pass


class NewtonError(SolverError):
    pass


class JacobianMismatchError(SolverError):
    pass


class StepFailure(RuntimeError):
    """A time step that did not produce an admissible state."""

    def __init__(self, message: str, reason, report=None):
        self.reason = reason
        self.report = report
        super().__init__(message)


class ExperimentError(RuntimeError):
    pass


class InjectivityWarning(RuntimeWarning):
    """Emitted when det(grad eta) is not positive somewhere."""
