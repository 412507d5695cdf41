"""Progress reporting utilities for the gossip flooding package.

This module provides a simple progress tracker for long-running batches such
as Monte Carlo replications. Output goes to stderr so that the data written on
stdout by the command-line tool is never interleaved with progress text.
"""
import sys
from typing import Optional, TextIO


class ProgressPrinter:
    """Simple progress printer for console output.

    This class provides a lightweight progress indicator that updates in-place
    on the console using carriage returns. It's designed for tracking progress
    through batch operations where the total count is known upfront.

    Attributes:
        task_name: Description of the task being performed
        total: Total number of items to process
        stream: Where the progress text is written (stderr by default)

    Example:
        >>> progress = ProgressPrinter("Replications", 100)
        >>> for i in range(100):
        ...     progress.update(i + 1)
        >>> progress.done()
        Replications...Done!
    """

    def __init__(self, task_name: str, total: int, stream: Optional[TextIO] = None):
        """Initialize progress printer.

        Args:
            task_name: Name of the task being tracked (e.g., "tau_V on K_64")
            total: Total number of items to process
            stream: Output stream; defaults to sys.stderr
        """
        self.task_name = task_name
        self.total = total
        self.stream = stream if stream is not None else sys.stderr

    def update(self, current: int) -> None:
        """Update progress display with current status.

        Args:
            current: Current item number (1-based, not 0-based)
        """
        print(f"{self.task_name}...{current}/{self.total}", end='\r', flush=True, file=self.stream)

    def done(self) -> None:
        """Mark task as complete and finalize the display."""
        print(f"{self.task_name}...Done!    ", file=self.stream)  # Extra spaces clear any remaining digits
