#!/usr/bin/env python3
"""
K-Means baseline: Lloyd clustering, one UAV over each cluster's enclosing circle.
"""
from typing import List, NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from channel import ChannelParams, DeploymentConstraints
from deployment import Deployment
from logger import get_logger
from scenario import GroundUser, positions_array
from .base import SolverOptions, build_uavs, check_fleet_size, nearest_first_admission, place_over

_RNG_SALT = 1


class LloydResult(NamedTuple):
    centers: np.ndarray
    labels: np.ndarray
    sse_history: List[float]
    iterations: int


def lloyd(points: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 100) -> LloydResult:
    """Lloyd's iterations from k distinct sampled points.

    Stops at an assignment fixpoint or after max_iter assignment steps. An
    empty cluster keeps its previous center.

    Args:
        points: (n, 2) positions
        k: Number of clusters, 1 <= k <= n
        rng: Generator for the initial sample
        max_iter: Iteration cap

    Returns:
        LloydResult; sse_history holds the within-cluster sum of squares after
        every assignment step
    """
    n = len(points)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    centers = points[rng.choice(n, size=k, replace=False)].copy()
    labels = None
    history: List[float] = []

    iterations = 0
    for iterations in range(1, max_iter + 1):
        dist, new_labels = cKDTree(centers).query(points)
        history.append(float(np.sum(dist ** 2)))
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)

    return LloydResult(centers, labels, history, iterations)


def run_kmeans(users: List[GroundUser], k: int, constraints: DeploymentConstraints,
               params: ChannelParams, options: SolverOptions = SolverOptions()) -> Deployment:
    """K-Means placement with nearest-UAV, capacity-capped association.

    Each non-empty cluster gets a UAV at the center of its smallest enclosing
    circle, at the beam-derived altitude clamped to [h_min, h_max] (or the
    fixed altitude in options). Users then attach to the nearest UAV.
    """
    check_fleet_size(k, constraints)
    positions = positions_array(users)
    ids = [u.id for u in users]
    k = min(k, len(users))

    result = lloyd(positions, k, options.rng(_RNG_SALT), options.kmeans_max_iter)
    get_logger().debug("lloyd finished", k=k, iterations=result.iterations, sse=round(result.sse_history[-1], 3))

    placed = [place_over(positions[result.labels == j], constraints, options)
              for j in range(k) if np.any(result.labels == j)]
    centers = np.array([(x, y) for x, y, _ in placed])
    _, nearest = cKDTree(centers).query(positions)
    members = nearest_first_admission(positions, centers, np.asarray(nearest, dtype=int), constraints.gamma_max)
    return Deployment.from_uavs('kmeans', build_uavs(placed, members, ids, constraints))
