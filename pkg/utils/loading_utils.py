"""
Loading Utilities - Progress reporting for multi-step numerical runs
"""

import logging
import time
from typing import Optional

logger = logging.getLogger(__name__)


class ProgressTracker:
    """
    Track progress for multi-step operations (simulation blocks, table rows)
    """

    def __init__(self, total_steps: int, operation_name: str, log_every: int = 1):
        """
        Initialize progress tracker

        Args:
            total_steps: Total number of steps
            operation_name: Name of the operation
            log_every: Emit a DEBUG line every this many steps
        """
        self.total_steps = max(int(total_steps), 1)
        self.current_step = 0
        self.operation_name = operation_name
        self.log_every = max(int(log_every), 1)
        self.started = time.perf_counter()

    def step(self, step_name: Optional[str] = None):
        """
        Move to next step

        Args:
            step_name: Name of the current step
        """
        self.current_step += 1
        if self.current_step % self.log_every == 0 or self.current_step == self.total_steps:
            label = f": {step_name}" if step_name else ""
            logger.debug(f"{self.operation_name}{label} ({self.current_step}/{self.total_steps})")

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def complete(self, message: Optional[str] = None):
        """Log completion with elapsed wall time."""
        final_message = message or f"{self.operation_name} completed"
        logger.info(f"{final_message} in {self.elapsed:.2f}s")

    def error(self, message: Optional[str] = None):
        """Log a failed operation."""
        error_message = message or f"{self.operation_name} failed"
        logger.error(f"{error_message} after {self.current_step}/{self.total_steps} steps")


def create_multi_step_progress(operation_name: str, steps: int, log_every: int = 1) -> ProgressTracker:
    """
    Create a multi-step progress tracker

    Args:
        operation_name: Name of the operation
        steps: Number of steps
        log_every: DEBUG logging stride

    Returns:
        ProgressTracker instance
    """
    return ProgressTracker(steps, operation_name, log_every=log_every)
