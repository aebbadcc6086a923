#!/usr/bin/env python3
"""Tests for geometry primitives, checked against brute-force oracles."""
import itertools
import math

import numpy as np
import pytest

from geometry import (Circle, Point2, centroid, circumcircle, convex_hull, cross, enclosing_circle_with,
                      nearest_unserved, point_in_hull, smallest_enclosing_circle)


# ---------------- Oracles ----------------

def brute_force_hull_vertices(points):
    """Endpoints of every pair with all other points on its left (or on the segment)."""
    pts = np.array(sorted(set(map(tuple, points))), dtype=float)
    n = len(pts)
    if n <= 2:
        return {tuple(p) for p in pts}
    a = pts[:, None, None, :]
    b = pts[None, :, None, :]
    c = pts[None, None, :, :]
    ab = b - a
    ac = c - a
    crs = ab[..., 0] * ac[..., 1] - ab[..., 1] * ac[..., 0]
    dot = ab[..., 0] * ac[..., 0] + ab[..., 1] * ac[..., 1]
    len2 = (ab[..., 0] ** 2 + ab[..., 1] ** 2)
    ok = (crs > 0) | ((crs == 0) & (dot >= 0) & (dot <= len2))
    edge = ok.all(axis=2) & ~np.eye(n, dtype=bool)
    i, j = np.nonzero(edge)
    return {tuple(pts[k]) for k in np.concatenate([i, j])}


def brute_force_sec_radius(points):
    pts = [Point2(*p) for p in points]
    if len(set(pts)) == 1:
        return 0.0

    def encloses(c):
        return all(c.center.distance_to(p) <= c.radius * (1 + 1e-12) + 1e-12 for p in pts)

    best = math.inf
    for p, q in itertools.combinations(pts, 2):
        c = Circle(Point2((p.x + q.x) / 2, (p.y + q.y) / 2), p.distance_to(q) / 2)
        if c.radius < best and encloses(c):
            best = c.radius
    for p, q, r in itertools.combinations(pts, 3):
        c = circumcircle(p, q, r)
        if c is not None and c.radius < best and encloses(c):
            best = c.radius
    return best


# ---------------- Convex hull ----------------

def test_hull_drops_interior_point():
    hull = convex_hull([(0, 0), (4, 0), (4, 4), (0, 4), (2, 2)])
    assert hull == [(0, 0), (4, 0), (4, 4), (0, 4)]


def test_hull_singleton_and_pair():
    assert convex_hull([(0, 0)]) == [(0, 0)]
    assert convex_hull([(3, 1), (3, 1), (0, 0)]) == [(0, 0), (3, 1)]


def test_hull_excludes_collinear_edge_points():
    pts = [(0, 0), (1, 0), (2, 0), (3, 0), (3, 3), (0, 3), (0, 1)]
    assert convex_hull(pts) == [(0, 0), (3, 0), (3, 3), (0, 3)]


def test_hull_of_collinear_points_is_the_two_extremes():
    assert convex_hull([(2, 2), (0, 0), (1, 1), (3, 3)]) == [(0, 0), (3, 3)]


def test_hull_empty_input():
    with pytest.raises(ValueError, match="empty point set"):
        convex_hull([])


def test_hull_rejects_non_finite():
    with pytest.raises(ValueError):
        convex_hull([(0, 0), (math.nan, 1)])


def test_hull_orientation_and_containment():
    rng = np.random.default_rng(3)
    for _ in range(50):
        pts = rng.uniform(0, 400, size=(int(rng.integers(3, 60)), 2))
        hull = convex_hull(pts)
        assert hull[0] == min(hull)
        n = len(hull)
        for i in range(n):
            assert cross(hull[i], hull[(i + 1) % n], hull[(i + 2) % n]) >= 0
        assert all(point_in_hull(p, hull) for p in pts)


def test_hull_idempotent():
    pts = np.random.default_rng(5).uniform(0, 100, size=(40, 2))
    hull = convex_hull(pts)
    assert convex_hull(hull) == hull


def test_hull_matches_brute_force_oracle():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 51))
        pts = rng.uniform(0, 400, size=(n, 2))
        assert {tuple(p) for p in convex_hull(pts)} == brute_force_hull_vertices(pts)


def test_hull_matches_oracle_on_integer_grid():
    rng = np.random.default_rng(12)
    for _ in range(100):
        pts = rng.integers(0, 6, size=(int(rng.integers(1, 30)), 2)).astype(float)
        assert {tuple(p) for p in convex_hull(pts)} == brute_force_hull_vertices(pts)


def test_point_in_hull_outside():
    hull = convex_hull([(0, 0), (4, 0), (4, 4), (0, 4)])
    assert point_in_hull((4, 2), hull)
    assert not point_in_hull((4.01, 2), hull)


# ---------------- Smallest enclosing circle ----------------

def test_sec_single_point():
    c = smallest_enclosing_circle([(0, 0)])
    assert c.center == (0, 0)
    assert c.radius == 0


def test_sec_two_points():
    c = smallest_enclosing_circle([(0, 0), (4, 0)])
    assert c.center == pytest.approx((2, 0))
    assert c.radius == pytest.approx(2)


def test_sec_right_triangle():
    c = smallest_enclosing_circle([(0, 0), (2, 0), (0, 2)])
    assert c.center == pytest.approx((1, 1))
    assert c.radius == pytest.approx(math.sqrt(2))


def test_sec_empty_input():
    with pytest.raises(ValueError, match="empty point set"):
        smallest_enclosing_circle([])


def test_sec_with_duplicates():
    c = smallest_enclosing_circle([(1, 1)] * 5 + [(3, 1)])
    assert c.radius == pytest.approx(1)


def test_sec_deterministic_for_seed():
    pts = np.random.default_rng(9).uniform(0, 400, size=(300, 2))
    assert smallest_enclosing_circle(pts, seed=4) == smallest_enclosing_circle(pts, seed=4)


def test_sec_matches_exhaustive_oracle():
    """1000 random sets of up to 12 points."""
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        pts = rng.uniform(0, 400, size=(n, 2))
        c = smallest_enclosing_circle(pts, seed=int(rng.integers(1 << 30)))
        assert all(c.contains(p) for p in pts)
        assert abs(c.radius - brute_force_sec_radius(pts)) < 1e-9


def test_incremental_circle_matches_full_recompute():
    rng = np.random.default_rng(17)
    pts = [Point2(*p) for p in rng.uniform(0, 200, size=(60, 2))]
    circle = Circle(pts[0], 0.0)
    for i in range(1, len(pts)):
        circle = enclosing_circle_with(circle, pts[:i], pts[i])
        assert all(circle.contains(p) for p in pts[:i + 1])
        assert circle.radius == pytest.approx(smallest_enclosing_circle(pts[:i + 1]).radius, abs=1e-9)


def test_incremental_circle_unchanged_for_inside_point():
    circle = smallest_enclosing_circle([(0, 0), (4, 0)])
    assert enclosing_circle_with(circle, [Point2(0, 0), Point2(4, 0)], (2, 1)) is circle


def test_incremental_circle_accepts_arrays():
    rng = np.random.default_rng(23)
    pts = rng.uniform(0, 150, size=(40, 2))
    circle = Circle(Point2(*pts[0]), 0.0)
    for i in range(1, len(pts)):
        circle = enclosing_circle_with(circle, pts[:i], pts[i])
    assert all(circle.contains(p) for p in pts)
    assert circle.radius == pytest.approx(smallest_enclosing_circle(pts).radius, abs=1e-9)


# ---------------- Queries ----------------

def test_nearest_unserved():
    assert nearest_unserved((0, 0), [(5, 0), (3, 0), (9, 9)]) == 1


def test_nearest_unserved_tie_lowest_index():
    assert nearest_unserved((0, 0), [(1, 0), (0, 1)]) == 0


def test_nearest_unserved_matches_linear_scan():
    cands = np.random.default_rng(1).uniform(0, 10, size=(100, 2))
    expected = min(range(100), key=lambda i: (math.hypot(cands[i][0] - 1, cands[i][1] - 1), i))
    assert nearest_unserved((1, 1), cands) == expected


def test_nearest_unserved_empty():
    with pytest.raises(ValueError, match="no candidates"):
        nearest_unserved((0, 0), [])


@pytest.mark.parametrize("points, expected", [
    ([(0, 0), (2, 2)], (1, 1)),
    ([(5, 5)], (5, 5)),
    ([(0, 0), (3, 0), (0, 3)], (1, 1)),
])
def test_centroid(points, expected):
    assert centroid(points) == pytest.approx(expected)


def test_centroid_empty():
    with pytest.raises(ValueError):
        centroid([])
