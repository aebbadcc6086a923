#!/usr/bin/env python3
"""Small helpers shared by the harness and the CLI."""
import math
from typing import Sequence

import numpy as np


def trial_seed(base_seed: int, trial_index: int) -> int:
    """Seed of one trial; every algorithm in the trial sees the same snapshot."""
    return base_seed + trial_index


def format_number(value) -> str:
    """Compact, deterministic text form for CSV cells."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value.is_integer() and abs(value) < 1e15:
            return str(int(value))
        return format(value, '.12g')
    return str(value)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x).

    Raises:
        ValueError: With fewer than two points or non-positive values
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise ValueError("need at least two (x, y) pairs")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def percentile(values: Sequence[float], q: float) -> float:
    """q-th percentile (0..100) with linear interpolation."""
    if not len(values):
        return math.nan
    return float(np.percentile(np.asarray(values, dtype=float), q))
