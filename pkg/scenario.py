#!/usr/bin/env python3
"""
Ground-user scenarios: Matérn cluster snapshots and Gauss-Markov mobility.

Everything is driven by numpy Generators seeded from the config, so a seed and
a config always reproduce the same users and trajectories.
"""
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from geometry import Point2


@dataclass(frozen=True)
class GroundUser:
    """A ground terminal."""
    id: int
    pos: Point2
    vel: Tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Area, Matérn cluster and Gauss-Markov parameters."""
    area_width: float = 400.0
    area_height: float = 400.0
    n_users: int = 600
    n_parents: int = 8
    cluster_radius: float = 40.0
    seed: int = 1
    alpha: float = 0.8
    mean_velocity: Tuple[float, float] = (0.0, 0.0)
    noise_sigma: float = 1.0
    dt: float = 1.0

    def __post_init__(self):
        if self.n_users < 1:
            raise ValueError("scenario.n_users must be >= 1")
        if self.n_parents < 1:
            raise ValueError("scenario.n_parents must be >= 1")
        if not self.cluster_radius > 0:
            raise ValueError("scenario.cluster_radius must be > 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("scenario.alpha must lie in [0, 1]")
        if not self.dt > 0:
            raise ValueError("scenario.dt must be > 0")
        if not (self.area_width > 0 and self.area_height > 0):
            raise ValueError("scenario area must be positive")
        if self.noise_sigma < 0:
            raise ValueError("scenario.noise_sigma must be >= 0")
        object.__setattr__(self, 'mean_velocity', tuple(float(v) for v in self.mean_velocity))

    @property
    def area(self) -> Tuple[float, float]:
        return (self.area_width, self.area_height)

    def with_seed(self, seed: int) -> 'ScenarioConfig':
        return replace(self, seed=seed)


# ---------------- Matérn cluster process ----------------

def sample_parents(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Cluster centers drawn uniformly in the area, shape (n_parents, 2)."""
    return rng.uniform((0.0, 0.0), config.area, size=(config.n_parents, 2))


def scatter_children(parents: np.ndarray, n: int, radius: float, area: Tuple[float, float],
                     rng: np.random.Generator) -> np.ndarray:
    """Place n points uniformly in disks around uniformly chosen parents.

    Points that land outside the area are redrawn around the same parent until
    they fall inside.

    Returns:
        (n, 2) positions
    """
    owner = rng.integers(len(parents), size=n)
    out = np.empty((n, 2))
    todo = np.arange(n)
    width, height = area
    while todo.size:
        r = radius * np.sqrt(rng.uniform(size=todo.size))
        phi = rng.uniform(0.0, 2.0 * math.pi, size=todo.size)
        pts = parents[owner[todo]] + np.column_stack((r * np.cos(phi), r * np.sin(phi)))
        out[todo] = pts
        inside = (pts[:, 0] >= 0) & (pts[:, 0] <= width) & (pts[:, 1] >= 0) & (pts[:, 1] <= height)
        todo = todo[~inside]
    return out


def generate_users(config: ScenarioConfig) -> List[GroundUser]:
    """Draw a Matérn cluster snapshot.

    Initial velocities come from the stationary Gauss-Markov distribution
    (mean_velocity plus Gaussian noise of noise_sigma per axis).

    Args:
        config: Scenario configuration

    Returns:
        Exactly n_users users with ids 0..n_users-1
    """
    rng = np.random.default_rng(config.seed)
    parents = sample_parents(config, rng)
    positions = scatter_children(parents, config.n_users, config.cluster_radius, config.area, rng)
    velocities = np.asarray(config.mean_velocity) + config.noise_sigma * rng.standard_normal((config.n_users, 2))
    return [
        GroundUser(i, Point2(float(p[0]), float(p[1])), (float(v[0]), float(v[1])))
        for i, (p, v) in enumerate(zip(positions, velocities))
    ]


# ---------------- Gauss-Markov mobility ----------------

def _reflect(coord: np.ndarray, limit: float) -> Tuple[np.ndarray, np.ndarray]:
    """Fold coordinates back into [0, limit]; returns (folded, velocity sign)."""
    period = 2.0 * limit
    wrapped = np.mod(coord, period)
    folded = limit - np.abs(wrapped - limit)
    crossings = np.floor(coord / limit)
    sign = np.where(np.mod(crossings, 2) == 0, 1.0, -1.0)
    return folded, sign


def advance(positions: np.ndarray, velocities: np.ndarray, config: ScenarioConfig,
            rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """One slot of Gauss-Markov motion on arrays, with reflecting walls."""
    alpha = config.alpha
    noise = config.noise_sigma * rng.standard_normal(velocities.shape)
    new_vel = (alpha * velocities + (1.0 - alpha) * np.asarray(config.mean_velocity)
               + math.sqrt(1.0 - alpha * alpha) * noise)
    moved = positions + velocities * config.dt

    x, sx = _reflect(moved[:, 0], config.area_width)
    y, sy = _reflect(moved[:, 1], config.area_height)
    new_vel[:, 0] *= sx
    new_vel[:, 1] *= sy
    return np.column_stack((x, y)), new_vel


def step_mobility(users: List[GroundUser], config: ScenarioConfig,
                  rng: Optional[np.random.Generator] = None) -> List[GroundUser]:
    """Advance every user by one slot.

    Positions move with the previous velocity; a velocity component flips when
    its user bounces off a wall. Without rng the noise comes from a generator
    seeded with config.seed, so a lone call is reproducible.
    """
    if not users:
        return []
    if rng is None:
        rng = np.random.default_rng(config.seed)
    pos = np.array([(u.pos.x, u.pos.y) for u in users], dtype=float)
    vel = np.array([u.vel for u in users], dtype=float)
    pos, vel = advance(pos, vel, config, rng)
    return [
        GroundUser(u.id, Point2(float(p[0]), float(p[1])), (float(v[0]), float(v[1])))
        for u, p, v in zip(users, pos, vel)
    ]


def simulate_mobility(users: List[GroundUser], config: ScenarioConfig, steps: int,
                      seed: Optional[int] = None) -> List[GroundUser]:
    """Advance users by several slots with a generator seeded from seed (default: config.seed)."""
    rng = np.random.default_rng(config.seed if seed is None else seed)
    for _ in range(steps):
        users = step_mobility(users, config, rng)
    return users


def max_displacement(users: List[GroundUser], latency_s: float) -> float:
    """Largest distance any user travels during a compute window of latency_s."""
    if not users:
        return 0.0
    return max(math.hypot(*u.vel) for u in users) * latency_s


# ---------------- Import / export ----------------

def positions_array(users: List[GroundUser]) -> np.ndarray:
    return np.array([(u.pos.x, u.pos.y) for u in users], dtype=float).reshape(-1, 2)


def save_scenario(path: Path, users: List[GroundUser], config: ScenarioConfig):
    """Write users as JSON {area, seed, users:[{id,x,y,vx,vy}]}."""
    data = {
        'area': {'width': config.area_width, 'height': config.area_height},
        'seed': config.seed,
        'users': [
            {'id': u.id, 'x': u.pos.x, 'y': u.pos.y, 'vx': u.vel[0], 'vy': u.vel[1]}
            for u in users
        ],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(data, f, indent=1)


def load_scenario(path: Path) -> Tuple[List[GroundUser], Tuple[float, float], int]:
    """Read a scenario written by save_scenario() (or by an external tool).

    Returns:
        (users, (width, height), seed)
    """
    with open(path, 'r') as f:
        data = json.load(f)
    area = (float(data['area']['width']), float(data['area']['height']))
    users = [
        GroundUser(int(u['id']), Point2(float(u['x']), float(u['y'])),
                   (float(u.get('vx', 0.0)), float(u.get('vy', 0.0))))
        for u in data['users']
    ]
    return users, area, int(data.get('seed', 0))
