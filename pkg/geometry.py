#!/usr/bin/env python3
"""
Planar geometry primitives used by the peeling loop and the baselines.

Convex hull (monotone chain), smallest enclosing circle (Welzl, with a seeded
shuffle so runs are reproducible), nearest-candidate and centroid queries.
All functions are pure; Point2 and Circle are immutable.
"""
import math
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

# Absolute tolerance for all geometric comparisons (meters)
EPS = 1e-9

# Tighter relative slack used inside Welzl so the returned radius stays minimal
_WELZL_SLACK = 1 + 1e-14


class Point2(NamedTuple):
    """Ground-plane position in meters. Tuple ordering is lexicographic (x, then y)."""
    x: float
    y: float

    def distance_to(self, other: 'Point2') -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class Circle(NamedTuple):
    """Circle on the ground plane."""
    center: Point2
    radius: float

    def contains(self, point: Sequence[float], eps: float = EPS) -> bool:
        """Check whether a point lies inside or on the circle.

        Args:
            point: (x, y) position
            eps: Absolute slack in meters

        Returns:
            True if the point is within radius + eps of the center
        """
        return math.hypot(point[0] - self.center.x, point[1] - self.center.y) <= self.radius + eps


def _as_points(points: Sequence[Sequence[float]]) -> List[Point2]:
    if len(points) == 0:
        raise ValueError("empty point set")
    out = [Point2(float(p[0]), float(p[1])) for p in points]
    for p in out:
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise ValueError(f"non-finite coordinate: {p}")
    return out


def cross(o: Point2, a: Point2, b: Point2) -> float:
    """Z component of (a - o) x (b - o); positive for a counter-clockwise turn."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


# ---------------- Convex hull ----------------

def convex_hull(points: Sequence[Sequence[float]]) -> List[Point2]:
    """Convex hull by Andrew's monotone chain.

    Duplicates are removed and collinear boundary points are dropped, so only
    strict turns remain.

    Args:
        points: Non-empty sequence of (x, y) positions

    Returns:
        Hull vertices in counter-clockwise order, starting from the
        lexicographically smallest point

    Raises:
        ValueError: If points is empty
    """
    pts = sorted(set(_as_points(points)))
    if len(pts) <= 2:
        return pts

    lower: List[Point2] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= EPS:
            lower.pop()
        lower.append(p)

    upper: List[Point2] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= EPS:
            upper.pop()
        upper.append(p)

    return lower[:-1] + upper[:-1]


def point_in_hull(point: Sequence[float], hull: Sequence[Point2], eps: float = EPS) -> bool:
    """Signed-area containment test against a counter-clockwise hull.

    Args:
        point: (x, y) position
        hull: Output of convex_hull()
        eps: Tolerance on the signed area

    Returns:
        True if the point lies inside or on the polygon
    """
    p = Point2(float(point[0]), float(point[1]))
    if len(hull) == 1:
        return p.distance_to(hull[0]) <= eps
    if len(hull) == 2:
        a, b = hull
        if abs(cross(a, b, p)) > eps * max(1.0, a.distance_to(b)):
            return False
        dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)
        return -eps <= dot <= (b.x - a.x) ** 2 + (b.y - a.y) ** 2 + eps
    n = len(hull)
    return all(cross(hull[i], hull[(i + 1) % n], p) >= -eps for i in range(n))


# ---------------- Smallest enclosing circle ----------------

def _in_circle(c: Optional[Circle], p: Point2) -> bool:
    return c is not None and math.hypot(p.x - c.center.x, p.y - c.center.y) <= c.radius * _WELZL_SLACK


def _outside(pts: np.ndarray, c: Circle) -> np.ndarray:
    """Mask of the rows of pts that _in_circle() would reject."""
    return np.hypot(pts[:, 0] - c.center.x, pts[:, 1] - c.center.y) > c.radius * _WELZL_SLACK


def _diameter_circle(a: Point2, b: Point2) -> Circle:
    cx = (a.x + b.x) / 2
    cy = (a.y + b.y) / 2
    r0 = math.hypot(cx - a.x, cy - a.y)
    r1 = math.hypot(cx - b.x, cy - b.y)
    return Circle(Point2(cx, cy), max(r0, r1))


def circumcircle(a: Point2, b: Point2, c: Point2) -> Optional[Circle]:
    """Circle through three points, or None when they are collinear."""
    # Translate to the bounding-box center for numerical stability
    ox = (min(a.x, b.x, c.x) + max(a.x, b.x, c.x)) / 2
    oy = (min(a.y, b.y, c.y) + max(a.y, b.y, c.y)) / 2
    ax, ay = a.x - ox, a.y - oy
    bx, by = b.x - ox, b.y - oy
    cx, cy = c.x - ox, c.y - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    center = Point2(x, y)
    radius = max(center.distance_to(a), center.distance_to(b), center.distance_to(c))
    return Circle(center, radius)


def _circumcenters(a: Point2, b: Point2, pts: np.ndarray) -> np.ndarray:
    """Centers of the circles through a, b and each row of pts, as circumcircle() computes them.

    Rows collinear with a and b get NaN.
    """
    px, py = pts[:, 0], pts[:, 1]
    ox = (np.minimum(np.minimum(a.x, b.x), px) + np.maximum(np.maximum(a.x, b.x), px)) / 2
    oy = (np.minimum(np.minimum(a.y, b.y), py) + np.maximum(np.maximum(a.y, b.y), py)) / 2
    ax, ay = a.x - ox, a.y - oy
    bx, by = b.x - ox, b.y - oy
    cx, cy = px - ox, py - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    d = np.where(d == 0.0, np.nan, d)
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    return np.column_stack((x, y))


def _circle_two_boundary(pts: np.ndarray, p: Point2, q: Point2) -> Circle:
    base = _diameter_circle(p, q)
    rest = pts[_outside(pts, base)]
    if not len(rest):
        return base

    # Circumcircles through points outside the diameter circle, split by side of pq
    ex, ey = q.x - p.x, q.y - p.y
    side = ex * (rest[:, 1] - p.y) - ey * (rest[:, 0] - p.x)
    centers = _circumcenters(p, q, rest)
    offset = ex * (centers[:, 1] - p.y) - ey * (centers[:, 0] - p.x)
    valid = ~np.isnan(offset)

    def pick(mask: np.ndarray, farthest) -> Optional[Circle]:
        rows = np.flatnonzero(mask & valid)
        if not len(rows):
            return None
        r = rest[rows[farthest(offset[rows])]]
        return circumcircle(p, q, Point2(float(r[0]), float(r[1])))

    left = pick(side > 0.0, np.argmax)
    right = pick(side < 0.0, np.argmin)
    if left is None and right is None:
        return base
    if left is None:
        return right
    if right is None:
        return left
    return left if left.radius <= right.radius else right


def _circle_one_boundary(pts: np.ndarray, p: Point2) -> Circle:
    c = Circle(p, 0.0)
    start = 0
    while True:
        outside = np.flatnonzero(_outside(pts[start:], c))
        if not len(outside):
            return c
        i = start + int(outside[0])
        q = Point2(float(pts[i, 0]), float(pts[i, 1]))
        c = _diameter_circle(p, q) if c.radius == 0.0 else _circle_two_boundary(pts[:i + 1], p, q)
        start = i + 1


def smallest_enclosing_circle(points: Sequence[Sequence[float]], seed: int = 0) -> Circle:
    """Minimal circle enclosing all points (Welzl's algorithm, iterative form).

    The input is visited in a fixed pseudorandom permutation drawn from
    ``seed``, so identical input and seed give a bit-identical circle.

    Args:
        points: Non-empty sequence of (x, y) positions
        seed: Seed of the shuffle permutation

    Returns:
        Circle determined by at most three boundary points

    Raises:
        ValueError: If points is empty
    """
    pts = np.array(_as_points(points), dtype=float).reshape(-1, 2)
    shuffled = pts[np.random.default_rng(seed).permutation(len(pts))]

    c = Circle(Point2(float(shuffled[0, 0]), float(shuffled[0, 1])), 0.0)
    start = 1
    while True:
        outside = np.flatnonzero(_outside(shuffled[start:], c))
        if not len(outside):
            return c
        i = start + int(outside[0])
        c = _circle_one_boundary(shuffled[:i + 1], Point2(float(shuffled[i, 0]), float(shuffled[i, 1])))
        start = i + 1


def enclosing_circle_with(circle: Circle, points: Sequence[Sequence[float]], new_point: Sequence[float]) -> Circle:
    """Grow a known enclosing circle by one point.

    ``circle`` must be the smallest enclosing circle of ``points``. When the new
    point is already inside, the circle is returned unchanged; otherwise the
    new point lies on the boundary of the grown circle.

    Args:
        circle: Smallest enclosing circle of points
        points: Points already enclosed, a sequence or an (m, 2) array
        new_point: Point to add

    Returns:
        Smallest enclosing circle of points plus new_point
    """
    p = Point2(float(new_point[0]), float(new_point[1]))
    if _in_circle(circle, p):
        return circle
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return _circle_one_boundary(np.vstack((pts, [[p.x, p.y]])), p)


# ---------------- Queries ----------------

def nearest_unserved(reference: Sequence[float], candidates: Sequence[Sequence[float]]) -> int:
    """Index of the candidate closest to reference (lowest index wins ties).

    Raises:
        ValueError: If candidates is empty
    """
    if len(candidates) == 0:
        raise ValueError("no candidates")
    arr = np.asarray(candidates, dtype=float).reshape(-1, 2)
    d2 = (arr[:, 0] - reference[0]) ** 2 + (arr[:, 1] - reference[1]) ** 2
    return int(np.argmin(d2))


def centroid(points: Sequence[Sequence[float]]) -> Point2:
    """Arithmetic mean of the coordinates.

    Raises:
        ValueError: If points is empty
    """
    if len(points) == 0:
        raise ValueError("empty point set")
    arr = np.asarray(points, dtype=float).reshape(-1, 2)
    return Point2(float(arr[:, 0].mean()), float(arr[:, 1].mean()))
