"""
Utils package - Constants, errors and progress reporting
"""

from .constants import EXIT_CODES, ERROR_MESSAGES
from .errors import (
    KellyClockError,
    ConfigurationError,
    DomainError,
    BranchError,
    FractionOutOfRangeError,
    ConvergenceError,
    CalibrationError,
)
from .loading_utils import ProgressTracker, create_multi_step_progress

__all__ = [
    'EXIT_CODES', 'ERROR_MESSAGES',
    'KellyClockError', 'ConfigurationError', 'DomainError', 'BranchError',
    'FractionOutOfRangeError', 'ConvergenceError', 'CalibrationError',
    'ProgressTracker', 'create_multi_step_progress',
]
