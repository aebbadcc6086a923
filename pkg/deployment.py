#!/usr/bin/env python3
"""
Deployment result types.

This is the contract between the placement algorithms and everything that
consumes their output (metrics, validator, harness, JSON export).
"""
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from geometry import Circle, Point2


class Verdict(Enum):
    """Outcome of a feasibility check, in the order the checks run."""
    OK = "ok"
    CAPACITY = "capacity"
    ALTITUDE = "altitude"
    QOS = "qos"
    EXHAUSTED = "exhausted"   # no candidates left to add


@dataclass(frozen=True)
class UavBs:
    """A deployed aerial base station."""
    id: int
    x: float
    y: float
    h: float
    coverage: Circle
    served: Tuple[int, ...] = ()

    @property
    def pos(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.h)


@dataclass(frozen=True)
class CommitRecord:
    """What the peeling loop knew when it committed one UAV."""
    uav_id: int
    seed_user: int
    cluster_size: int
    edge_user: int
    edge_rate: float
    stop: Verdict
    qos_ok: bool


@dataclass(frozen=True)
class Deployment:
    """Full solution: UAVs plus user -> UAV association."""
    algorithm: str
    uavs: Tuple[UavBs, ...] = ()
    association: Mapping[int, int] = field(default_factory=dict)
    solve_time: float = 0.0
    commits: Tuple[CommitRecord, ...] = ()

    @classmethod
    def from_uavs(cls, algorithm: str, uavs: List[UavBs],
                  commits: Tuple[CommitRecord, ...] = ()) -> 'Deployment':
        """Build a deployment whose association is derived from the served sets."""
        association: Dict[int, int] = {}
        for uav in uavs:
            for user_id in uav.served:
                association[user_id] = uav.id
        return cls(algorithm, tuple(uavs), association, 0.0, tuple(commits))

    def with_solve_time(self, seconds: float) -> 'Deployment':
        return replace(self, solve_time=seconds)

    @property
    def loads(self) -> List[int]:
        return [len(u.served) for u in self.uavs]

    def uav_positions(self) -> np.ndarray:
        return np.array([u.pos for u in self.uavs], dtype=float).reshape(-1, 3)

    def uav_index(self) -> Dict[int, int]:
        """Map UAV id -> position in self.uavs."""
        return {u.id: i for i, u in enumerate(self.uavs)}

    def same_solution(self, other: 'Deployment') -> bool:
        """Equality that ignores solve_time."""
        return (self.uavs == other.uavs and dict(self.association) == dict(other.association)
                and self.commits == other.commits)

    # ---------------- JSON ----------------

    def to_dict(self) -> dict:
        return {
            'algorithm': self.algorithm,
            'uavs': [
                {'id': u.id, 'x': u.x, 'y': u.y, 'h': u.h, 'r': u.coverage.radius}
                for u in self.uavs
            ],
            'association': {str(k): v for k, v in sorted(self.association.items())},
            'solve_time_s': self.solve_time,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Deployment':
        association = {int(k): int(v) for k, v in data.get('association', {}).items()}
        served: Dict[int, List[int]] = {}
        for user_id, uav_id in sorted(association.items()):
            served.setdefault(uav_id, []).append(user_id)
        uavs = tuple(
            UavBs(int(u['id']), float(u['x']), float(u['y']), float(u['h']),
                  Circle(Point2(float(u['x']), float(u['y'])), float(u['r'])),
                  tuple(served.get(int(u['id']), [])))
            for u in data.get('uavs', [])
        )
        return cls(data.get('algorithm', 'unknown'), uavs, association,
                   float(data.get('solve_time_s', 0.0)))

    def save_json(self, path: Optional[Path] = None) -> str:
        """Serialize; also write to path when given."""
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            Path(path).write_text(text)
        return text

    @classmethod
    def load_json(cls, path: Path) -> 'Deployment':
        return cls.from_dict(json.loads(Path(path).read_text()))
