#!/usr/bin/env python3
"""Random baseline: UAVs drawn uniformly in the area and the legal altitude band."""
from typing import List

import numpy as np
from scipy.spatial import cKDTree

from channel import ChannelParams, DeploymentConstraints
from deployment import Deployment
from scenario import GroundUser, positions_array
from .base import SolverOptions, build_uavs, check_fleet_size, nearest_first_admission

_RNG_SALT = 3


def run_random(users: List[GroundUser], k: int, constraints: DeploymentConstraints,
               params: ChannelParams, options: SolverOptions = SolverOptions()) -> Deployment:
    """Random 3D placement with nearest-UAV, capacity-capped association."""
    check_fleet_size(k, constraints)
    positions = positions_array(users)
    ids = [u.id for u in users]
    rng = options.rng(_RNG_SALT)
    low, high = options.bounds(positions)

    xy = rng.uniform(low, high, size=(k, 2))
    h = rng.uniform(constraints.h_min, constraints.h_max, size=k)
    _, nearest = cKDTree(xy).query(positions)
    members = nearest_first_admission(positions, xy, np.asarray(nearest, dtype=int), constraints.gamma_max)
    placed = [(float(x), float(y), float(z)) for (x, y), z in zip(xy, h)]
    return Deployment.from_uavs('random', build_uavs(placed, members, ids, constraints))
