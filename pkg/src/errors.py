"""
Exception types shared by the verification toolkit
"""

from typing import Optional


class VerificationError(Exception):
    """Base class for every error raised by the toolkit"""


class DomainError(VerificationError, ValueError):
    """A precondition on dimensions, scales or parameters is violated"""


class ConfigError(VerificationError, ValueError):
    """Run configuration could not be parsed or failed validation"""


class QuadratureError(VerificationError):
    """
    Adaptive quadrature did not reach the requested tolerance

    Args:
        message: Description of the failing integral
        value: Best value obtained
        error_estimate: Achieved error estimate
    """

    def __init__(self, message: str, value: Optional[float] = None,
                 error_estimate: Optional[float] = None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class SingularDerivativeError(VerificationError, ArithmeticError):
    """Second derivative of the nonlinearity requested at u=0 with p<2"""


class RegimeError(VerificationError, ValueError):
    """Bubble scale is not well separated from the hole radius"""


class ScaleOrderingError(VerificationError, ValueError):
    """Tower scales are not strictly ordered above the hole radius"""


class NewtonError(VerificationError):
    """Base class for critical-point search failures"""

    def __init__(self, message: str, iterations: int = 0,
                 grad_norm: Optional[float] = None):
        super().__init__(message)
        self.iterations = iterations
        self.grad_norm = grad_norm


class NewtonDivergenceError(NewtonError):
    """Iteration budget exhausted or non-finite iterate"""


class BoxCollisionError(NewtonError):
    """Iterate left the admissible box d < mu_i < 1/d"""


class SingularStepError(NewtonError):
    """Newton system could not be solved"""
