"""
Exception hierarchy.
Every error carries the process exit code the CLI reports for it.
"""

from typing import Any, Optional, Sequence


class LibrationError(Exception):
    """Base class for toolkit errors."""

    exit_code: int = 1


class ParameterError(LibrationError, ValueError):
    """A parameter is outside its admissible range."""

    exit_code = 2


class SingularityError(LibrationError):
    """State coincides with a primary."""

    exit_code = 2


class ClosedFormError(LibrationError):
    """The first-order equilibrium formula is not defined at this parameter."""

    exit_code = 2


class JetError(LibrationError):
    exit_code = 2


class ConvergenceError(LibrationError):
    """Newton iteration failed; keeps the last iterate for diagnosis."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        last_iterate: Optional[Sequence[float]] = None,
        residual: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.last_iterate = tuple(last_iterate) if last_iterate is not None else None
        self.residual = residual


class SingularJacobianError(ConvergenceError):
    pass


class NormalizationError(LibrationError):
    """Quadratic Hamiltonian cannot be brought to action-angle form."""

    exit_code = 3


class BracketError(LibrationError):
    """Stability verdict does not change across the bisection bracket."""

    exit_code = 4


class IntegrationError(LibrationError):
    """Integration stopped early; `trajectory` holds the samples computed so far."""

    exit_code = 3

    def __init__(self, message: str, trajectory: Any = None) -> None:
        super().__init__(message)
        self.trajectory = trajectory


class CloseApproachError(IntegrationError):
    exit_code = 5


class StepUnderflowError(IntegrationError):
    exit_code = 3
