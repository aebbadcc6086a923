#!/usr/bin/env python3
"""Shared pieces of the comparison baselines: options, placement and capacity-capped association."""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from channel import DeploymentConstraints, coverage_radius, required_altitude
from deployment import UavBs
from geometry import Circle, Point2, smallest_enclosing_circle


@dataclass(frozen=True)
class SolverOptions:
    """Knobs that are not part of the physical problem.

    Attributes:
        seed: Seeds every random choice a baseline makes
        geometry_seed: Shuffle seed of the smallest-enclosing-circle routine
        area: (width, height) of the service area, origin at (0, 0); None means
            the bounding box of the users
        ccs_altitude: Fixed altitude of the spiral baseline
        fixed_altitude: When set, K-Means and Voronoi UAVs fly at this altitude
            instead of the beam-derived one
        kmeans_max_iter: Lloyd iteration cap
    """
    seed: int = 0
    geometry_seed: int = 0
    area: Optional[Tuple[float, float]] = None
    ccs_altitude: float = 100.0
    fixed_altitude: Optional[float] = None
    kmeans_max_iter: int = 100

    def rng(self, salt: int) -> np.random.Generator:
        """Generator for one algorithm; salt keeps algorithms from sharing a stream."""
        return np.random.default_rng([self.seed, salt])

    def bounds(self, positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of the service area."""
        if self.area is not None:
            return np.zeros(2), np.asarray(self.area, dtype=float)
        return positions.min(axis=0), positions.max(axis=0)


def check_fleet_size(k: int, constraints: DeploymentConstraints):
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > constraints.k_max:
        raise ValueError(f"k={k} exceeds k_max={constraints.k_max}")


def clamp_altitude(h: float, constraints: DeploymentConstraints) -> float:
    return min(max(h, constraints.h_min), constraints.h_max)


def cluster_altitude(radius: float, constraints: DeploymentConstraints,
                     fixed_altitude: Optional[float]) -> float:
    """Altitude whose footprint covers radius, clamped to the legal band (or a fixed one)."""
    if fixed_altitude is not None:
        return clamp_altitude(fixed_altitude, constraints)
    return clamp_altitude(required_altitude(radius, constraints.theta_bw, constraints.h_min), constraints)


def place_over(points: np.ndarray, constraints: DeploymentConstraints,
               options: SolverOptions) -> Tuple[float, float, float]:
    """UAV position over the smallest enclosing circle of points."""
    circle = smallest_enclosing_circle(points, seed=options.geometry_seed)
    h = cluster_altitude(circle.radius, constraints, options.fixed_altitude)
    return (circle.center.x, circle.center.y, h)


def nearest_first_admission(positions: np.ndarray, centers: np.ndarray, assignment: np.ndarray,
                            gamma_max: int) -> List[List[int]]:
    """Admit each UAV's assigned users closest-first until gamma_max is reached.

    Args:
        positions: (n, 2) user positions
        centers: (k, 2) horizontal UAV positions
        assignment: (n,) UAV index per user, -1 for none
        gamma_max: Per-UAV capacity

    Returns:
        For each UAV, the admitted user rows; overflow users are left out
    """
    dist = np.full(len(positions), np.inf)
    assigned = assignment >= 0
    dist[assigned] = np.hypot(*(positions[assigned] - centers[assignment[assigned]]).T)

    admitted: List[List[int]] = []
    for j in range(len(centers)):
        rows = np.flatnonzero(assignment == j)
        order = rows[np.lexsort((rows, dist[rows]))]
        admitted.append([int(r) for r in order[:gamma_max]])
    return admitted


def build_uavs(positions_xyh: Sequence[Tuple[float, float, float]], members: Sequence[Sequence[int]],
               ids: Sequence[int], constraints: DeploymentConstraints) -> List[UavBs]:
    """Wrap positions and admitted rows into UavBs records with sequential ids."""
    uavs = []
    for j, ((x, y, h), rows) in enumerate(zip(positions_xyh, members)):
        uavs.append(UavBs(j, float(x), float(y), float(h),
                          Circle(Point2(float(x), float(y)), coverage_radius(h, constraints.theta_bw)),
                          tuple(ids[r] for r in rows)))
    return uavs
