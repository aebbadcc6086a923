#!/usr/bin/env python3
"""
Post-hoc deployment checker.

Recomputes everything from the Deployment and the users alone; it imports no
solver code. Violations come back as readable strings so a failing trial can
be reported as-is.
"""
import math
from typing import Dict, List

import numpy as np

from channel import ChannelParams, DeploymentConstraints, achievable_rate
from deployment import Deployment
from geometry import EPS, smallest_enclosing_circle
from scenario import GroundUser


class DeploymentInvalid(Exception):
    """A deployment broke at least one hard constraint."""

    def __init__(self, algorithm: str, violations: List[str]):
        self.algorithm = algorithm
        self.violations = list(violations)
        shown = '; '.join(self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"{algorithm}: {shown}{more}")


def _tol(value: float) -> float:
    return EPS * max(1.0, abs(value))


def validate_deployment(deployment: Deployment, users: List[GroundUser], constraints: DeploymentConstraints,
                        params: ChannelParams, *, sequential_qos: bool = False,
                        require_enclosure: bool = False) -> List[str]:
    """Check a deployment against the hard constraints.

    Args:
        deployment: Solution to check
        users: The snapshot it was computed on
        constraints: Fleet limits
        params: Channel constants (only used for the sequential QoS replay)
        sequential_qos: Replay the per-commit edge-user rate check in fleet order,
            each UAV seeing only the UAVs before it as interferers
        require_enclosure: Served users must lie inside their UAV's footprint

    Returns:
        Violation messages, empty when the deployment is valid
    """
    violations: List[str] = []
    positions: Dict[int, tuple] = {u.id: (u.pos.x, u.pos.y) for u in users}
    tan_bw = math.tan(constraints.theta_bw)

    if len(deployment.uavs) > constraints.k_max:
        violations.append(f"fleet size {len(deployment.uavs)} exceeds k_max={constraints.k_max}")

    uav_ids = [u.id for u in deployment.uavs]
    if len(set(uav_ids)) != len(uav_ids):
        violations.append("duplicate UAV ids")

    owner: Dict[int, int] = {}
    for uav in deployment.uavs:
        if len(uav.served) > constraints.gamma_max:
            violations.append(f"uav {uav.id}: {len(uav.served)} users exceed gamma_max={constraints.gamma_max}")
        if not constraints.h_min - EPS <= uav.h <= constraints.h_max + EPS:
            violations.append(f"uav {uav.id}: altitude {uav.h} outside [{constraints.h_min}, {constraints.h_max}]")
        expected_r = uav.h * tan_bw
        if abs(uav.coverage.radius - expected_r) > _tol(expected_r):
            violations.append(f"uav {uav.id}: coverage radius {uav.coverage.radius} != h*tan(theta_bw)={expected_r}")
        for user_id in uav.served:
            if user_id not in positions:
                violations.append(f"uav {uav.id}: serves unknown user {user_id}")
            if user_id in owner:
                violations.append(f"user {user_id} served by uav {owner[user_id]} and uav {uav.id}")
            owner[user_id] = uav.id

    known_uavs = set(uav_ids)
    for user_id, uav_id in deployment.association.items():
        if uav_id not in known_uavs:
            violations.append(f"user {user_id} associated with missing uav {uav_id}")
        elif owner.get(user_id) != uav_id:
            violations.append(f"user {user_id}: association says uav {uav_id}, served sets disagree")
    for user_id, uav_id in owner.items():
        if deployment.association.get(user_id) != uav_id:
            violations.append(f"user {user_id} served by uav {uav_id} but not in the association")

    if require_enclosure:
        violations.extend(_enclosure_violations(deployment, positions))
    if sequential_qos:
        violations.extend(_sequential_qos_violations(deployment, positions, constraints, params))
    return violations


def _enclosure_violations(deployment: Deployment, positions: Dict[int, tuple]) -> List[str]:
    out = []
    for uav in deployment.uavs:
        pts = np.array([positions[i] for i in uav.served if i in positions], dtype=float).reshape(-1, 2)
        if not len(pts):
            continue
        r = uav.coverage.radius
        dist = np.hypot(pts[:, 0] - uav.x, pts[:, 1] - uav.y)
        outside = int(np.sum(dist > r + _tol(r)))
        if outside:
            out.append(f"uav {uav.id}: {outside} served users outside the coverage circle")
        sec = smallest_enclosing_circle(pts)
        if sec.radius > r + _tol(r):
            out.append(f"uav {uav.id}: enclosing radius {sec.radius} exceeds coverage radius {r}")
    return out


def _sequential_qos_violations(deployment: Deployment, positions: Dict[int, tuple],
                               constraints: DeploymentConstraints, params: ChannelParams) -> List[str]:
    out = []
    for record in deployment.commits:
        if not record.qos_ok:
            out.append(f"uav {record.uav_id}: committed with a failing QoS check")

    earlier: List[tuple] = []
    for uav in deployment.uavs:
        members = [positions[i] for i in uav.served if i in positions]
        if members:
            edge = max(range(len(members)),
                       key=lambda i: (math.hypot(members[i][0] - uav.x, members[i][1] - uav.y), -i))
            rate = achievable_rate(members[edge], 0, [uav.pos] + earlier, len(members),
                                   params, constraints.theta_bw)
            if rate < constraints.r_min_rate:
                out.append(f"uav {uav.id}: edge user rate {rate:.1f} bps below {constraints.r_min_rate:.1f}")
        earlier.append(uav.pos)
    return out


def assert_valid(deployment: Deployment, users: List[GroundUser], constraints: DeploymentConstraints,
                 params: ChannelParams, **checks):
    """Raise DeploymentInvalid when validate_deployment() finds anything."""
    violations = validate_deployment(deployment, users, constraints, params, **checks)
    if violations:
        raise DeploymentInvalid(deployment.algorithm, violations)
