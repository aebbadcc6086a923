#!/usr/bin/env python3
"""Comparison baselines. All of them return the same Deployment type as the peeling solver."""

from .base import SolverOptions, nearest_first_admission
from .ccs import local_cover, run_ccs
from .kmeans import lloyd, run_kmeans
from .random_placement import run_random
from .voronoi import run_voronoi

__all__ = [
    'SolverOptions',
    'nearest_first_admission',
    'local_cover',
    'run_ccs',
    'lloyd',
    'run_kmeans',
    'run_voronoi',
    'run_random',
]
