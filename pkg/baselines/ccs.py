#!/usr/bin/env python3
"""
Counter-clockwise spiral baseline.

Fixed altitude, fixed footprint. Walks the hull of the uncovered users
counter-clockwise; each still-uncovered hull user gets a disk that keeps it
covered and slides over the uncovered users around it (local cover). When a
lap of the hull is done, the next hull layer is walked.
"""
from typing import List

import numpy as np

from channel import ChannelParams, DeploymentConstraints, coverage_radius
from deployment import Deployment, UavBs
from geometry import EPS, Circle, Point2, convex_hull
from logger import get_logger
from scenario import GroundUser, positions_array
from .base import SolverOptions, clamp_altitude

_LOCAL_COVER_STEPS = 10


def local_cover(boundary_row: int, positions: np.ndarray, uncovered: np.ndarray, radius: float) -> np.ndarray:
    """Center of a fixed-radius disk over the uncovered users near a boundary user.

    Flat-kernel mean shift started at the boundary user. After each step the
    center is pulled back to within radius of the boundary user, so it never
    leaves the disk.

    Returns:
        (2,) disk center
    """
    boundary = positions[boundary_row]
    center = boundary.copy()
    for _ in range(_LOCAL_COVER_STEPS):
        near = uncovered & (np.hypot(positions[:, 0] - center[0], positions[:, 1] - center[1]) <= radius)
        near[boundary_row] = True
        target = positions[near].mean(axis=0)
        offset = target - boundary
        norm = float(np.hypot(*offset))
        if norm > radius:
            target = boundary + offset * (radius / norm)
        if float(np.hypot(*(target - center))) <= EPS:
            return target
        center = target
    return center


def run_ccs(users: List[GroundUser], constraints: DeploymentConstraints, params: ChannelParams,
            options: SolverOptions = SolverOptions()) -> Deployment:
    """Place fixed-size cells from the boundary inward.

    Args:
        users: Ground users
        constraints: Fleet limits (theta_bw sets the fixed footprint)
        params: Channel constants (unused by the placement itself)
        options: ccs_altitude is read

    Returns:
        Deployment; users outside every disk stay unserved
    """
    if not users:
        raise ValueError("empty user set")
    positions = positions_array(users)
    ids = [u.id for u in users]
    h = clamp_altitude(options.ccs_altitude, constraints)
    radius = coverage_radius(h, constraints.theta_bw)

    uncovered = np.ones(len(users), dtype=bool)
    uavs: List[UavBs] = []

    while uncovered.any() and len(uavs) < constraints.k_max:
        rows = np.flatnonzero(uncovered)
        for vertex in convex_hull(positions[rows]):
            if len(uavs) >= constraints.k_max:
                break
            at_vertex = uncovered & (positions[:, 0] == vertex.x) & (positions[:, 1] == vertex.y)
            if not at_vertex.any():
                continue   # swallowed by an earlier disk on this lap

            center = local_cover(int(np.argmax(at_vertex)), positions, uncovered, radius)
            dist = np.hypot(positions[:, 0] - center[0], positions[:, 1] - center[1])
            inside = np.flatnonzero(uncovered & (dist <= radius + EPS))
            members = inside[np.lexsort((inside, dist[inside]))][:constraints.gamma_max]

            cx, cy = float(center[0]), float(center[1])
            uavs.append(UavBs(len(uavs), cx, cy, h, Circle(Point2(cx, cy), radius),
                              tuple(ids[r] for r in members)))
            uncovered[members] = False

    get_logger().debug("ccs placed", uavs=len(uavs), unserved=int(uncovered.sum()))
    return Deployment.from_uavs('ccs', uavs)
