#!/usr/bin/env python3
"""
Perimeter-peeling deployment.

The outer loop takes the convex hull of the users still uncovered, seeds a
cluster at its first counter-clockwise vertex and grows that cluster around
its running centroid until capacity, altitude or QoS would break. The UAV sits
at the center of the cluster's smallest enclosing circle, at the lowest
altitude whose beam footprint covers that circle.

The QoS check sees only UAVs committed earlier in the loop as interferers, and
it also refuses a placement whose footprint would drag a user served earlier
below the rate floor. A seed that cannot be served even alone is left
unserved. Final rates against the whole fleet are computed separately by
metrics.
"""
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from channel import (FOOTPRINT_EPS, ChannelParams, DeploymentConstraints, coverage_radius, elevation_angle_deg,
                     footprint_interference, link_powers, received_power, required_altitude, slice_rate)
from deployment import CommitRecord, Deployment, UavBs, Verdict
from geometry import EPS, Circle, Point2, enclosing_circle_with
from logger import get_logger
from scenario import GroundUser, positions_array


class EdgeCheck(NamedTuple):
    verdict: Verdict
    h: float            # h_req clamped to h_max
    edge: int           # index into the checked cluster
    rate: float


class ClusterResult(NamedTuple):
    """Outcome of one cluster expansion."""
    position: Tuple[float, float, float]
    cluster: List[int]
    circle: Circle
    stop: Verdict
    check: EdgeCheck    # last passing check, or the failing check of the lone seed


class CommittedFleet:
    """UAVs committed so far and what they do to every user of the snapshot.

    For each user it keeps the power arriving from committed UAVs other than
    the user's own. Served users whose rate met r_min_rate when their UAV was
    committed are protected: harms() reports a placement that would push one
    of them below the floor.
    """

    def __init__(self, positions: np.ndarray, constraints: DeploymentConstraints, params: ChannelParams):
        self.positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        self.constraints = constraints
        self.params = params
        n = len(self.positions)
        self.xyh: List[Tuple[float, float, float]] = []
        self.ambient = np.zeros(n)
        self.signal = np.zeros(n)
        self.load = np.zeros(n)
        self.protected = np.zeros(n, dtype=bool)

    @classmethod
    def interferers_only(cls, positions: np.ndarray, uavs: Sequence[Sequence[float]],
                         constraints: DeploymentConstraints, params: ChannelParams) -> 'CommittedFleet':
        """Fleet that serves nobody; only its interference counts."""
        fleet = cls(positions, constraints, params)
        fleet.xyh = [tuple(float(v) for v in u) for u in uavs]
        fleet.ambient = footprint_interference(fleet.positions, fleet.xyh, params, constraints.theta_bw)
        return fleet

    def _reach(self, xyh: Tuple[float, float, float], among: Optional[np.ndarray] = None):
        """Rows inside the footprint of a UAV at xyh, and the power each of them receives."""
        x, y, h = xyh
        pts = self.positions if among is None else self.positions[among]
        inside = np.hypot(pts[:, 0] - x, pts[:, 1] - y) <= h * math.tan(self.constraints.theta_bw) + FOOTPRINT_EPS
        rows = np.flatnonzero(inside) if among is None else among[inside]
        if not len(rows):
            return rows, np.zeros(0)
        power, _ = link_powers(self.positions[rows], [xyh], self.params)
        return rows, power[:, 0]

    def harms(self, xyh: Tuple[float, float, float]) -> bool:
        """Would a UAV at xyh push a protected user below r_min_rate."""
        guarded = np.flatnonzero(self.protected)
        if not len(guarded):
            return False
        rows, power = self._reach(xyh, guarded)
        if not len(rows):
            return False
        rates = slice_rate(self.signal[rows], self.ambient[rows] + power, self.load[rows], self.params)
        return bool(np.any(rates < self.constraints.r_min_rate))

    def commit(self, xyh: Tuple[float, float, float], members: Sequence[int]) -> int:
        """Add a UAV serving the given rows.

        Returns:
            Number of members whose rate meets r_min_rate at commit time
        """
        members = np.asarray(members, dtype=int)
        rows, power = self._reach(xyh)
        outsiders = ~np.isin(rows, members)
        self.ambient[rows[outsiders]] += power[outsiders]

        own, _ = link_powers(self.positions[members], [xyh], self.params)
        self.signal[members] = own[:, 0]
        self.load[members] = len(members)
        rates = slice_rate(self.signal[members], self.ambient[members], self.load[members], self.params)
        self.protected[members] = rates >= self.constraints.r_min_rate
        self.xyh.append(tuple(float(v) for v in xyh))
        return int(np.count_nonzero(self.protected[members]))


def evaluate_cluster(cluster: Sequence[Sequence[float]], circle: Circle,
                     constraints: DeploymentConstraints, params: ChannelParams,
                     existing_uavs: Union[Sequence[Sequence[float]], CommittedFleet],
                     ambient: Optional[np.ndarray] = None) -> EdgeCheck:
    """Run the capacity -> altitude -> QoS checks and keep the numbers behind them.

    The rate is only computed when capacity and altitude pass (otherwise 0.0).

    Args:
        cluster: (x, y) of every member, a sequence or an (m, 2) array
        circle: Smallest enclosing circle of the cluster
        constraints: Fleet limits
        params: Channel constants
        existing_uavs: (x, y, h) of committed UAVs, or a CommittedFleet, which
            also fails the QoS check when the placement harms its protected users
        ambient: Power already reaching each member from existing_uavs;
            computed for the edge user when omitted
    """
    pts = np.asarray(cluster, dtype=float).reshape(-1, 2)
    h_req = required_altitude(circle.radius, constraints.theta_bw, constraints.h_min)
    if len(pts) > constraints.gamma_max:
        return EdgeCheck(Verdict.CAPACITY, h_req, -1, 0.0)
    if h_req > constraints.h_max + EPS:
        return EdgeCheck(Verdict.ALTITUDE, h_req, -1, 0.0)
    h = min(h_req, constraints.h_max)

    # Worst case is the member farthest from the circle center; argmax keeps the lowest index on ties
    cx, cy = circle.center
    edge = int(np.argmax(np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)))
    edge_xy = (float(pts[edge, 0]), float(pts[edge, 1]))
    fleet = existing_uavs if isinstance(existing_uavs, CommittedFleet) else None
    if ambient is not None:
        interference = float(ambient[edge])
    else:
        uavs = fleet.xyh if fleet is not None else existing_uavs
        interference = float(footprint_interference([edge_xy], uavs, params, constraints.theta_bw)[0])

    uav = (cx, cy, h)
    d = math.sqrt((cx - edge_xy[0]) ** 2 + (cy - edge_xy[1]) ** 2 + h * h)
    signal = float(received_power(d, elevation_angle_deg(uav, edge_xy), params))
    rate = float(slice_rate(signal, interference, len(pts), params))
    if rate < constraints.r_min_rate:
        return EdgeCheck(Verdict.QOS, h, edge, rate)
    if fleet is not None and fleet.harms(uav):
        return EdgeCheck(Verdict.QOS, h, edge, rate)
    return EdgeCheck(Verdict.OK, h, edge, rate)


def check_feasibility(cluster: Sequence[Sequence[float]], candidate_circle: Circle,
                      constraints: DeploymentConstraints, params: ChannelParams,
                      existing_uavs: Union[Sequence[Sequence[float]], CommittedFleet]) -> Verdict:
    """First violated constraint of a candidate cluster, or Verdict.OK.

    Args:
        cluster: (x, y) of every member of the candidate cluster
        candidate_circle: Smallest enclosing circle of the cluster
        constraints: Fleet limits
        params: Channel constants
        existing_uavs: (x, y, h) of UAVs already committed (the interferers),
            or the CommittedFleet holding them

    Returns:
        Verdict.CAPACITY, ALTITUDE, QOS or OK, checked in that order
    """
    if len(cluster) == 0:
        raise ValueError("empty cluster")
    return evaluate_cluster(cluster, candidate_circle, constraints, params, existing_uavs).verdict


def cluster_and_sec(seed_index: int, positions: np.ndarray, uncovered: np.ndarray,
                    constraints: DeploymentConstraints, params: ChannelParams,
                    existing_uavs: Union[Sequence[Sequence[float]], CommittedFleet]) -> ClusterResult:
    """Grow a cluster from a seed user.

    The seed alone is checked first; when it fails, the result holds just the
    seed and the failing verdict as its stop.

    Args:
        seed_index: Row of the seed in positions; must be uncovered
        positions: (n, 2) user positions
        uncovered: (n,) boolean mask of users not yet served
        constraints: Fleet limits
        params: Channel constants
        existing_uavs: (x, y, h) of committed UAVs, or the CommittedFleet

    Returns:
        ClusterResult with the last feasible UAV position and its cluster
        (row indices, seed first)
    """
    if not uncovered[seed_index]:
        raise ValueError("seed user is already covered")
    positions = np.asarray(positions, dtype=float)
    fleet = existing_uavs if isinstance(existing_uavs, CommittedFleet) else \
        CommittedFleet.interferers_only(positions, existing_uavs, constraints, params)

    available = np.array(uncovered, dtype=bool, copy=True)
    available[seed_index] = False
    n_free = int(np.count_nonzero(available))

    # Member positions and their ambient interference, in admission order
    pts = np.empty((n_free + 1, 2))
    amb = np.empty(n_free + 1)
    pts[0] = positions[seed_index]
    amb[0] = fleet.ambient[seed_index]

    members = [seed_index]
    seed = Point2(float(pts[0, 0]), float(pts[0, 1]))
    circle = Circle(seed, 0.0)
    check = evaluate_cluster(pts[:1], circle, constraints, params, fleet, amb[:1])
    if check.verdict is not Verdict.OK:
        return ClusterResult((seed.x, seed.y, check.h), members, circle, check.verdict, check)

    sum_x, sum_y = seed.x, seed.y
    stop = Verdict.EXHAUSTED
    while len(members) <= n_free:
        m = len(members)
        cx, cy = sum_x / m, sum_y / m
        d2 = (positions[:, 0] - cx) ** 2 + (positions[:, 1] - cy) ** 2
        d2[~available] = np.inf
        candidate = int(np.argmin(d2))

        pts[m] = positions[candidate]
        amb[m] = fleet.ambient[candidate]
        test_circle = enclosing_circle_with(circle, pts[:m], pts[m])
        trial = evaluate_cluster(pts[:m + 1], test_circle, constraints, params, fleet, amb[:m + 1])
        if trial.verdict is not Verdict.OK:
            stop = trial.verdict
            break

        members.append(candidate)
        circle = test_circle
        check = trial
        sum_x += float(pts[m, 0])
        sum_y += float(pts[m, 1])
        available[candidate] = False

    return ClusterResult((circle.center.x, circle.center.y, check.h), members, circle, stop, check)


def run_scope(users: List[GroundUser], constraints: DeploymentConstraints,
              params: ChannelParams) -> Deployment:
    """Deploy UAVs by peeling the uncovered set from its perimeter inward.

    Stops when every user is covered or k_max UAVs are committed. Users left
    over, and seeds that fail the check even alone, stay unserved.

    Args:
        users: Ground users
        constraints: Fleet limits
        params: Channel constants

    Returns:
        Deployment with one CommitRecord per UAV
    """
    if not users:
        raise ValueError("empty user set")
    logger = get_logger()
    positions = positions_array(users)
    ids = [u.id for u in users]
    uncovered = np.ones(len(users), dtype=bool)
    fleet = CommittedFleet(positions, constraints, params)

    uavs: List[UavBs] = []
    commits: List[CommitRecord] = []
    left_out = 0

    while uncovered.any() and len(uavs) < constraints.k_max:
        # First hull vertex = smallest uncovered point in (x, y) order, lowest row on duplicates
        rows = np.flatnonzero(uncovered)
        seed_row = int(rows[np.lexsort((rows, positions[rows, 1], positions[rows, 0]))[0]])

        result = cluster_and_sec(seed_row, positions, uncovered, constraints, params, fleet)
        if result.check.verdict is not Verdict.OK:
            uncovered[seed_row] = False
            left_out += 1
            logger.debug("seed left unserved", user=ids[seed_row], verdict=result.stop.value,
                         edge_rate=round(result.check.rate, 1))
            continue

        uav_id = len(uavs)
        x, y, h = result.position
        satisfied = fleet.commit((x, y, h), result.cluster)
        uavs.append(UavBs(uav_id, x, y, h,
                          Circle(Point2(x, y), coverage_radius(h, constraints.theta_bw)),
                          tuple(ids[r] for r in result.cluster)))
        commits.append(CommitRecord(
            uav_id=uav_id,
            seed_user=ids[seed_row],
            cluster_size=len(result.cluster),
            edge_user=ids[result.cluster[result.check.edge]],
            edge_rate=result.check.rate,
            stop=result.stop,
            qos_ok=result.check.verdict is Verdict.OK,
        ))
        uncovered[result.cluster] = False

        logger.debug("uav committed", uav=uav_id, users=len(result.cluster), satisfied=satisfied,
                     h=round(h, 3), stop=result.stop.value, edge_rate=round(result.check.rate, 1))

    if left_out:
        logger.debug("seeds left unserved", count=left_out, uavs=len(uavs))
    return Deployment.from_uavs('scope', uavs, tuple(commits))
