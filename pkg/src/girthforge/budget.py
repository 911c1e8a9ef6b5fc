"""Wall-clock budget threaded through long-running stages."""

from __future__ import annotations

import time
from typing import Optional


class TimeLimitReached(Exception):
    """Raised inside a stage when the wall-clock budget is exhausted."""


class Deadline:
    """Monotonic-clock deadline; seconds=None means unlimited."""

    def __init__(self, seconds: Optional[float] = None):
        self.limit = seconds
        self._end = None if seconds is None else time.monotonic() + seconds

    def expired(self) -> bool:
        return self._end is not None and time.monotonic() >= self._end

    def check(self):
        """Raise TimeLimitReached once the budget is spent."""
        if self.expired():
            raise TimeLimitReached()

    def remaining(self) -> Optional[float]:
        if self._end is None:
            return None
        return max(0.0, self._end - time.monotonic())
