"""
Module 'tempered.exceptions'

Exception hierarchy shared by every app of the project.

Key Classes:

- **TemperedError**: base class, never raised directly.
- **ValidationError**: malformed or inconsistent input (dimensions, Hermiticity,
  state/channel validity, file contents). Carries the offending ``field`` when
  one can be named.
- **ConvergenceError**: the dense eigensolver did not converge.
- **SolverError**: an SDP finished without a certified answer.
- **NotSdpRepresentableError**: a monotone was requested for a cone that has no
  semidefinite description (the separable cone).
"""
from typing import Any, Optional


class TemperedError(Exception):
    """
    Base class for all errors raised by the project.
    """


class ValidationError(TemperedError, ValueError):
    """
    Raised when an input fails validation.

    Attributes:
        field (str, optional): Name of the offending field, if known.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field

    def __str__(self) -> str:
        message = super().__str__()
        if self.field:
            return f"{self.field}: {message}"
        return message


class DimensionMismatchError(ValidationError):
    """
    Raised when operator or channel dimensions do not fit together.
    """


class NonHermitianError(ValidationError):
    """
    Raised when a matrix required to be Hermitian is not, within tolerance.
    """


class ConvergenceError(TemperedError):
    """
    Raised when the Hermitian eigensolver fails to converge.
    """


class SolverError(TemperedError):
    """
    Raised when an SDP did not produce a certified answer.

    Attributes:
        solution: The ``SdpSolution`` that was rejected, if any.
        report: The ``VerifyReport`` that failed, if any.
    """

    def __init__(self, message: str, solution: Any = None, report: Any = None):
        super().__init__(message)
        self.solution = solution
        self.report = report


class NotSdpRepresentableError(TemperedError):
    """
    Raised when a monotone is requested for the separable cone.
    """
