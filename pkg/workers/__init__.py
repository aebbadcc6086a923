#!/usr/bin/env python3
"""Workers package - Background threads for experiment trials."""

from workers.trial_worker import TrialWorkerPool

__all__ = ['TrialWorkerPool']
