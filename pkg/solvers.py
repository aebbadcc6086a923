#!/usr/bin/env python3
"""
Solver registry.

Every placement algorithm registers under the name the harness and CLI use.
Variants whose fleet size is borrowed from another algorithm (K-Means with
K^SCOPE or K^CCS, Voronoi, Random) name that algorithm in `fleet_from`; the
borrowed run happens before the clock starts.
"""
import time
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional

from baselines import SolverOptions, run_ccs, run_kmeans, run_random, run_voronoi
from channel import ChannelParams, DeploymentConstraints
from deployment import Deployment
from logger import get_logger
from scenario import GroundUser
from scope_core import run_scope

SolverFn = Callable[[List[GroundUser], DeploymentConstraints, ChannelParams, SolverOptions, Optional[int]], Deployment]


@dataclass(frozen=True)
class SolverSpec:
    name: str
    fn: SolverFn
    fleet_from: Optional[str] = None


# Global solver registry
_solver_registry: Dict[str, SolverSpec] = {}


def register_solver(name: str, fleet_from: Optional[str] = None):
    """Decorator to register a solver function.

    Args:
        name: Name to register the solver under
        fleet_from: Registered solver whose fleet size becomes this solver's k

    Returns:
        Decorator function

    Example:
        @register_solver("kmeans_scope", fleet_from="scope")
        def _kmeans(users, constraints, params, options, k):
            ...
    """
    def decorator(fn: SolverFn) -> SolverFn:
        if name in _solver_registry:
            raise ValueError(f"solver already registered: {name}")
        _solver_registry[name] = SolverSpec(name, fn, fleet_from)
        return fn
    return decorator


def get_solver(name: str) -> SolverSpec:
    try:
        return _solver_registry[name]
    except KeyError:
        raise ValueError(f"unknown algorithm '{name}' (known: {', '.join(algorithm_names())})") from None


def algorithm_names() -> List[str]:
    return list(_solver_registry)


@register_solver("scope")
def _scope(users, constraints, params, options, k=None):
    return run_scope(users, constraints, params)


@register_solver("ccs")
def _ccs(users, constraints, params, options, k=None):
    return run_ccs(users, constraints, params, options)


@register_solver("kmeans_scope", fleet_from="scope")
def _kmeans_scope(users, constraints, params, options, k=None):
    return run_kmeans(users, k, constraints, params, options)


@register_solver("kmeans_ccs", fleet_from="ccs")
def _kmeans_ccs(users, constraints, params, options, k=None):
    return run_kmeans(users, k, constraints, params, options)


@register_solver("voronoi", fleet_from="scope")
def _voronoi(users, constraints, params, options, k=None):
    return run_voronoi(users, k, constraints, params, options)


@register_solver("random", fleet_from="scope")
def _random(users, constraints, params, options, k=None):
    return run_random(users, k, constraints, params, options)


def resolve_fleet_size(algorithm: str, users: List[GroundUser], constraints: DeploymentConstraints,
                       params: ChannelParams, options: SolverOptions) -> Optional[int]:
    """k for a fleet-borrowing solver, or None when the solver picks its own fleet."""
    spec = get_solver(algorithm)
    if spec.fleet_from is None:
        return None
    donor = get_solver(spec.fleet_from)
    return len(donor.fn(users, constraints, params, options, None).uavs)


def solve(algorithm: str, users: List[GroundUser], constraints: DeploymentConstraints,
          params: ChannelParams, options: SolverOptions = SolverOptions(),
          k: Optional[int] = None) -> Deployment:
    """Run one algorithm and time it with a monotonic clock.

    Args:
        algorithm: Registered solver name
        users: Ground users (one snapshot)
        constraints: Fleet limits
        params: Channel constants
        options: Seeds and baseline knobs
        k: Fleet size for fleet-borrowing solvers; resolved (untimed) when None

    Returns:
        Deployment labelled with the registry name, solve_time in seconds
    """
    spec = get_solver(algorithm)
    if spec.fleet_from is not None and k is None:
        k = resolve_fleet_size(algorithm, users, constraints, params, options)

    start = time.perf_counter()
    deployment = spec.fn(users, constraints, params, options, k)
    elapsed = time.perf_counter() - start

    get_logger().debug("solved", algorithm=algorithm, users=len(users), uavs=len(deployment.uavs),
                       solve_ms=round(elapsed * 1e3, 3))
    return replace(deployment, algorithm=algorithm, solve_time=elapsed)
