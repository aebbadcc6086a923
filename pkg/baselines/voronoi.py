#!/usr/bin/env python3
"""
Voronoi baseline: random generator sites split the users into dominance cells,
one UAV per non-empty cell.
"""
from typing import List

import numpy as np
from scipy.spatial import cKDTree

from channel import ChannelParams, DeploymentConstraints
from deployment import Deployment
from scenario import GroundUser, positions_array
from .base import SolverOptions, build_uavs, check_fleet_size, nearest_first_admission, place_over

_RNG_SALT = 2


def run_voronoi(users: List[GroundUser], k: int, constraints: DeploymentConstraints,
                params: ChannelParams, options: SolverOptions = SolverOptions()) -> Deployment:
    """Voronoi-cell placement.

    Sites are drawn uniformly in the area; each user belongs to the cell of its
    nearest site. The UAV of a cell sits over the cell's enclosing circle and
    admits its users closest-first up to gamma_max.
    """
    check_fleet_size(k, constraints)
    positions = positions_array(users)
    ids = [u.id for u in users]
    low, high = options.bounds(positions)
    sites = options.rng(_RNG_SALT).uniform(low, high, size=(k, 2))

    _, cell = cKDTree(sites).query(positions)
    cell = np.asarray(cell, dtype=int)
    occupied = [j for j in range(k) if np.any(cell == j)]

    placed = [place_over(positions[cell == j], constraints, options) for j in occupied]
    centers = np.array([(x, y) for x, y, _ in placed])
    remap = np.full(k, -1)
    remap[occupied] = np.arange(len(occupied))
    members = nearest_first_admission(positions, centers, remap[cell], constraints.gamma_max)
    return Deployment.from_uavs('voronoi', build_uavs(placed, members, ids, constraints))
