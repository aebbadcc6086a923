#!/usr/bin/env python3
"""
Evaluation metrics: satisfaction, per-UAV load, Jain's fairness over loads,
and energy efficiency.

Rates are recomputed here from the final fleet (every UAV is a potential
interferer, masked by its beam footprint); nothing is taken from the solver's
own bookkeeping except the sequential figure, which reads the commit records.
"""
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from channel import ChannelParams, DeploymentConstraints, association_rates
from deployment import Deployment
from logger import get_logger
from scenario import GroundUser


@dataclass
class MetricsReport:
    """Everything the harness writes about one solved snapshot."""
    satisfaction: float
    loads: List[int] = field(default_factory=list)
    jain_index: float = 1.0
    energy_efficiency: float = 0.0    # bits/J
    total_throughput: float = 0.0     # bps
    active_uavs: int = 0
    solve_time: float = 0.0           # s
    sequential_satisfaction: Optional[float] = None
    jain_degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def user_rates(deployment: Deployment, users: List[GroundUser], constraints: DeploymentConstraints,
               params: ChannelParams) -> Dict[int, float]:
    """Rate of every associated user against the full fleet.

    Returns:
        {user_id: bps}; unserved users are absent
    """
    by_id = {u.id: u for u in users}
    served = [(uid, j) for uid, j in sorted(deployment.association.items()) if uid in by_id]
    if not served or not deployment.uavs:
        return {}

    index = deployment.uav_index()
    user_xy = np.array([(by_id[uid].pos.x, by_id[uid].pos.y) for uid, _ in served], dtype=float)
    serving = np.array([index[j] for _, j in served], dtype=int)
    rates = association_rates(user_xy, deployment.uav_positions(), serving,
                              np.array(deployment.loads), params, constraints.theta_bw)
    return {uid: float(r) for (uid, _), r in zip(served, rates)}


def satisfaction(deployment: Deployment, users: List[GroundUser], constraints: DeploymentConstraints,
                 params: ChannelParams) -> float:
    """Fraction of all N users whose recomputed rate reaches r_min_rate."""
    if not users or not deployment.uavs:
        return 0.0
    rates = user_rates(deployment, users, constraints, params)
    happy = sum(1 for r in rates.values() if r >= constraints.r_min_rate)
    return happy / len(users)


def jain_fairness(loads: Sequence[float]) -> float:
    """Jain's index of the per-UAV loads: (sum x)^2 / (K * sum x^2).

    All-zero loads are reported as 1.0.

    Raises:
        ValueError: If loads is empty
    """
    x = np.asarray(loads, dtype=float)
    if x.size == 0:
        raise ValueError("jain fairness needs at least one UAV")
    denom = x.size * float(np.sum(x * x))
    if denom == 0.0:
        return 1.0
    return float(np.sum(x)) ** 2 / denom


def energy_efficiency(deployment: Deployment, users: List[GroundUser], constraints: DeploymentConstraints,
                      params: ChannelParams) -> float:
    """Total throughput of associated users over the fleet's hover + transmit power.

    Raises:
        ValueError: If the deployment has no UAVs
    """
    if not deployment.uavs:
        raise ValueError("no active UAVs")
    throughput = sum(user_rates(deployment, users, constraints, params).values())
    return throughput / (len(deployment.uavs) * (params.p_hover + params.p_t))


def sequential_satisfaction(deployment: Deployment, n_users: int) -> Optional[float]:
    """Share of users placed in clusters whose commit-time QoS check held.

    None for deployments without commit records (every baseline).
    """
    if not deployment.commits or n_users == 0:
        return None
    return sum(c.cluster_size for c in deployment.commits if c.qos_ok) / n_users


def evaluate(deployment: Deployment, users: List[GroundUser], constraints: DeploymentConstraints,
             params: ChannelParams) -> MetricsReport:
    """Compute the full report in one pass over the rates."""
    logger = get_logger()
    loads = deployment.loads
    rates = user_rates(deployment, users, constraints, params)
    throughput = float(sum(rates.values()))
    happy = sum(1 for r in rates.values() if r >= constraints.r_min_rate)

    degenerate = sum(loads) == 0
    if degenerate:
        logger.warning("no user associated; fairness reported as 1.0", algorithm=deployment.algorithm)
    if deployment.uavs:
        jain = jain_fairness(loads)
        ee = throughput / (len(deployment.uavs) * (params.p_hover + params.p_t))
    else:
        logger.warning("empty fleet", algorithm=deployment.algorithm)
        jain, ee = 1.0, 0.0

    return MetricsReport(
        satisfaction=happy / len(users) if users else 0.0,
        loads=list(loads),
        jain_index=jain,
        energy_efficiency=ee,
        total_throughput=throughput,
        active_uavs=len(deployment.uavs),
        solve_time=deployment.solve_time,
        sequential_satisfaction=sequential_satisfaction(deployment, len(users)),
        jain_degenerate=degenerate,
    )
