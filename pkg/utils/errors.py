"""
Errors - Exception hierarchy shared by models, controllers and the CLI
"""

from typing import Optional, Sequence


class KellyClockError(Exception):
    """Base error for the toolkit."""


class ConfigurationError(KellyClockError, ValueError):
    """Model or run configuration violates its contract."""


class DomainError(KellyClockError, ValueError):
    """A function was evaluated outside its mathematical domain."""


class BranchError(DomainError):
    """Inverse Gaussian inverse MGF requested beyond its principal branch."""


class FractionOutOfRangeError(DomainError):
    """Investment fraction outside [0, max_fraction)."""

    def __init__(self, message: str, f: float, max_fraction: float):
        super().__init__(message)
        self.f = f
        self.max_fraction = max_fraction


class ConvergenceError(KellyClockError, ArithmeticError):
    """An iterative method stopped without meeting its tolerance."""


class CalibrationError(KellyClockError):
    """Uniform bound calibration failed; carries the last residuals."""

    def __init__(self, message: str, residuals: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.residuals = tuple(residuals) if residuals is not None else ()
