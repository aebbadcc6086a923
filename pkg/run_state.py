#!/usr/bin/env python3
"""
Run State - thread-safe record of one experiment's progress.

Written from event handlers, read by the harness when the run ends.
"""
import threading
import time
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, List, Optional


@dataclass
class TrialFailure:
    """A trial that raised instead of producing rows."""
    sweep_value: float
    trial: int
    seed: int
    error: BaseException


class RunState:
    """Thread-safe experiment state."""

    def __init__(self, total_trials: int, trials_per_point: int):
        """Initialize run state.

        Args:
            total_trials: Number of (sweep value, trial) units in the run
            trials_per_point: Trials at each sweep value
        """
        self._lock = threading.RLock()  # Reentrant lock
        self.total_trials = total_trials
        self.trials_per_point = trials_per_point
        self.started_at = time.time()

        self._rows: List[Any] = []
        self._failures: List[TrialFailure] = []
        self._done_per_point: Counter = Counter()
        self.trials_started = 0
        self.trials_completed = 0

    def mark_started(self):
        with self._lock:
            self.trials_started += 1

    def add_rows(self, sweep_value: float, rows: List[Any]) -> bool:
        """Store the rows of one finished trial.

        Returns:
            True when this trial was the last one of its sweep value
        """
        with self._lock:
            self._rows.extend(rows)
            self.trials_completed += 1
            self._done_per_point[sweep_value] += 1
            return self._done_per_point[sweep_value] == self.trials_per_point

    def record_failure(self, failure: TrialFailure):
        with self._lock:
            self._failures.append(failure)

    def first_failure(self) -> Optional[TrialFailure]:
        with self._lock:
            return self._failures[0] if self._failures else None

    def is_done(self) -> bool:
        """All trials accounted for, or the run has a failure."""
        with self._lock:
            return bool(self._failures) or self.trials_completed >= self.total_trials

    def rows(self) -> List[Any]:
        with self._lock:
            return list(self._rows)

    def get_progress(self) -> Dict[str, Any]:
        """Get a progress snapshot for logging."""
        with self._lock:
            return {
                'completed': self.trials_completed,
                'total': self.total_trials,
                'failed': len(self._failures),
                'elapsed_s': round(time.time() - self.started_at, 3),
            }
