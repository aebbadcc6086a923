#!/usr/bin/env python3
"""Tests for the perimeter-peeling solver."""
import math

import numpy as np
import pytest

from channel import ChannelParams, DeploymentConstraints, association_rates, coverage_radius, required_altitude
from deployment import Deployment, Verdict
from geometry import Circle, Point2, convex_hull, enclosing_circle_with, smallest_enclosing_circle
from metrics import user_rates
from scenario import GroundUser, ScenarioConfig, generate_users, positions_array
from scope_core import CommittedFleet, check_feasibility, cluster_and_sec, evaluate_cluster, run_scope
from validator import validate_deployment

PARAMS = ChannelParams()
CONSTRAINTS = DeploymentConstraints()


def make_users(points):
    return [GroundUser(i, Point2(float(x), float(y))) for i, (x, y) in enumerate(points)]


def test_single_user_gets_uav_overhead_at_h_min():
    deployment = run_scope(make_users([(120.0, 80.0)]), CONSTRAINTS, PARAMS)
    assert len(deployment.uavs) == 1
    uav = deployment.uavs[0]
    assert (uav.x, uav.y, uav.h) == (120.0, 80.0, CONSTRAINTS.h_min)
    assert dict(deployment.association) == {0: 0}


def test_tight_cluster_served_by_one_uav():
    rng = np.random.default_rng(0)
    pts = 200 + rng.uniform(-5, 5, size=(30, 2))
    deployment = run_scope(make_users(pts), CONSTRAINTS, PARAMS)
    assert len(deployment.uavs) == 1
    assert len(deployment.association) == 30


def test_empty_user_set():
    with pytest.raises(ValueError):
        run_scope([], CONSTRAINTS, PARAMS)


def test_seed_alone_is_exhausted():
    positions = np.array([[10.0, 10.0], [50.0, 50.0]])
    uncovered = np.array([True, False])
    result = cluster_and_sec(0, positions, uncovered, CONSTRAINTS, PARAMS, [])
    assert result.cluster == [0]
    assert result.position == (10.0, 10.0, CONSTRAINTS.h_min)
    assert result.stop is Verdict.EXHAUSTED


def test_capacity_one_keeps_only_the_seed():
    constraints = DeploymentConstraints(r_min_rate=2e6, c_backhaul=2e6)
    positions = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    result = cluster_and_sec(0, positions, np.ones(3, dtype=bool), constraints, PARAMS, [])
    assert result.cluster == [0]
    assert result.stop is Verdict.CAPACITY


def test_altitude_binds_on_collinear_users():
    positions = np.array([[200.0 * i, 0.0] for i in range(5)])
    result = cluster_and_sec(0, positions, np.ones(5, dtype=bool), CONSTRAINTS, PARAMS, [])
    assert result.cluster == [0, 1]
    assert result.stop is Verdict.ALTITUDE
    assert result.circle.radius == pytest.approx(100.0)
    assert result.position[:2] == pytest.approx((100.0, 0.0))
    assert result.position[2] == pytest.approx(100.0)


def test_seed_must_be_uncovered():
    with pytest.raises(ValueError):
        cluster_and_sec(0, np.zeros((1, 2)), np.array([False]), CONSTRAINTS, PARAMS, [])


def test_check_feasibility_capacity():
    constraints = DeploymentConstraints(r_min_rate=50e6)   # gamma_max = 3
    cluster = [(0.0, 0.0)] * 4
    assert check_feasibility(cluster, Circle(Point2(0, 0), 0.0), constraints, PARAMS, []) is Verdict.CAPACITY


def test_check_feasibility_altitude():
    cluster = [(0.0, 0.0), (300.0, 0.0)]
    circle = smallest_enclosing_circle(cluster)
    assert check_feasibility(cluster, circle, CONSTRAINTS, PARAMS, []) is Verdict.ALTITUDE


def test_check_feasibility_ok():
    cluster = [(0.0, 0.0), (1.0, 0.0)]
    circle = smallest_enclosing_circle(cluster)
    assert check_feasibility(cluster, circle, CONSTRAINTS, PARAMS, []) is Verdict.OK


def test_check_feasibility_qos_with_overhead_interferer():
    constraints = DeploymentConstraints(r_min_rate=100e6)
    cluster = [(100.0, 0.0)]
    circle = Circle(Point2(0.0, 0.0), 100.0)
    verdict = check_feasibility(cluster, circle, constraints, PARAMS, [(100.0, 0.0, 100.0)])
    assert verdict is Verdict.QOS


def test_check_feasibility_empty_cluster():
    with pytest.raises(ValueError):
        check_feasibility([], Circle(Point2(0, 0), 0.0), CONSTRAINTS, PARAMS, [])


def test_edge_user_is_farthest_from_center():
    cluster = [(0.0, 0.0), (10.0, 0.0), (4.0, 1.0)]
    circle = smallest_enclosing_circle(cluster)
    check = evaluate_cluster(cluster, circle, CONSTRAINTS, PARAMS, [])
    assert check.edge == 0
    assert check.verdict is Verdict.OK
    assert check.h == pytest.approx(CONSTRAINTS.h_min)


def test_commit_records_and_invariants():
    users = generate_users(ScenarioConfig(n_users=400, seed=11))
    deployment = run_scope(users, CONSTRAINTS, PARAMS)
    positions = positions_array(users)
    tan_bw = math.tan(CONSTRAINTS.theta_bw)

    assert len(deployment.commits) == len(deployment.uavs)
    for uav, record in zip(deployment.uavs, deployment.commits):
        assert record.uav_id == uav.id
        assert record.cluster_size == len(uav.served) >= 1
        assert record.seed_user == uav.served[0]
        assert record.qos_ok
        assert CONSTRAINTS.h_min <= uav.h <= CONSTRAINTS.h_max
        assert len(uav.served) <= CONSTRAINTS.gamma_max
        assert uav.coverage.radius == pytest.approx(uav.h * tan_bw)
        sec = smallest_enclosing_circle(positions[list(uav.served)])
        assert sec.radius <= uav.coverage.radius + 1e-9

    assert validate_deployment(deployment, users, CONSTRAINTS, PARAMS,
                               sequential_qos=True, require_enclosure=True) == []


def test_seed_is_the_lexicographically_smallest_uncovered_hull_vertex():
    users = generate_users(ScenarioConfig(n_users=150, seed=5))
    deployment = run_scope(users, CONSTRAINTS, PARAMS)
    positions = positions_array(users)
    for j, record in enumerate(deployment.commits):
        # Users served from this commit on were all still uncovered when it was seeded
        rows = sorted(uid for uav in deployment.uavs[j:] for uid in uav.served)
        assert tuple(positions[record.seed_user]) == convex_hull(positions[rows])[0]


def test_deterministic():
    users = generate_users(ScenarioConfig(n_users=300, seed=2))
    assert run_scope(users, CONSTRAINTS, PARAMS).same_solution(run_scope(users, CONSTRAINTS, PARAMS))


def test_k_max_leaves_users_unserved():
    constraints = DeploymentConstraints(k_max=2)
    users = make_users([(0, 0), (300, 0), (0, 300), (300, 300)])
    deployment = run_scope(users, constraints, PARAMS)
    assert len(deployment.uavs) == 2
    assert len(deployment.association) == 2


def test_json_round_trip(tmp_path):
    users = generate_users(ScenarioConfig(n_users=120, seed=4))
    deployment = run_scope(users, CONSTRAINTS, PARAMS)
    path = tmp_path / "deployment.json"
    deployment.save_json(path)
    loaded = Deployment.load_json(path)
    assert [(u.id, u.pos, u.coverage) for u in loaded.uavs] == [(u.id, u.pos, u.coverage) for u in deployment.uavs]
    assert [set(u.served) for u in loaded.uavs] == [set(u.served) for u in deployment.uavs]
    assert dict(loaded.association) == dict(deployment.association)
    assert coverage_radius(loaded.uavs[0].h, CONSTRAINTS.theta_bw) == pytest.approx(loaded.uavs[0].coverage.radius)


def test_enclosing_radius_never_shrinks_while_growing():
    users = generate_users(ScenarioConfig(n_users=300, seed=9))
    positions = positions_array(users)
    seed = int(np.lexsort((positions[:, 1], positions[:, 0]))[0])
    result = cluster_and_sec(seed, positions, np.ones(len(users), dtype=bool), CONSTRAINTS, PARAMS, [])
    assert len(result.cluster) > 1

    circle = Circle(Point2(*positions[seed]), 0.0)
    radii = [circle.radius]
    for i in range(1, len(result.cluster)):
        circle = enclosing_circle_with(circle, positions[result.cluster[:i]], positions[result.cluster[i]])
        radii.append(circle.radius)
    assert all(b >= a for a, b in zip(radii, radii[1:]))
    assert circle.radius == pytest.approx(result.circle.radius)
    assert tuple(circle.center) == pytest.approx(tuple(result.circle.center))
    assert result.position[2] == pytest.approx(
        required_altitude(circle.radius, CONSTRAINTS.theta_bw, CONSTRAINTS.h_min))


def test_altitude_inside_tolerance_is_clamped_to_h_max():
    far = 2 * CONSTRAINTS.h_max * math.tan(CONSTRAINTS.theta_bw) + 1e-9
    cluster = [(0.0, 0.0), (far, 0.0)]
    circle = smallest_enclosing_circle(cluster)
    assert required_altitude(circle.radius, CONSTRAINTS.theta_bw, CONSTRAINTS.h_min) > CONSTRAINTS.h_max

    check = evaluate_cluster(cluster, circle, CONSTRAINTS, PARAMS, [])
    assert check.verdict is Verdict.OK
    assert check.h == CONSTRAINTS.h_max

    result = cluster_and_sec(0, np.array(cluster), np.ones(2, dtype=bool), CONSTRAINTS, PARAMS, [])
    assert result.cluster == [0, 1]
    assert result.position[2] == CONSTRAINTS.h_max


# ---------------- Seeds refused alone ----------------

def test_lone_seed_check_reports_qos():
    constraints = DeploymentConstraints(r_min_rate=50e6)
    positions = np.array([[0.0, 0.0], [1.0, 0.0]])
    result = cluster_and_sec(0, positions, np.ones(2, dtype=bool), constraints, PARAMS, [(0.0, 0.0, 10.0)])
    assert result.cluster == [0]
    assert result.stop is Verdict.QOS
    assert result.check.verdict is Verdict.QOS
    assert result.check.rate < PARAMS.bandwidth


def test_seed_failing_alone_gets_no_uav():
    # gamma_max = 1 and the second user sits inside the first UAV's footprint
    constraints = DeploymentConstraints(r_min_rate=50e6, c_backhaul=50e6)
    users = make_users([(0.0, 0.0), (5.0, 0.0)])
    deployment = run_scope(users, constraints, PARAMS)
    assert len(deployment.uavs) == 1
    assert dict(deployment.association) == {0: 0}
    assert validate_deployment(deployment, users, constraints, PARAMS, sequential_qos=True) == []


@pytest.fixture(scope="module")
def strict_qos_run():
    constraints = DeploymentConstraints(r_min_rate=10e6)
    users = generate_users(ScenarioConfig(n_users=600, seed=6))
    return users, constraints, run_scope(users, constraints, PARAMS)


def test_high_qos_run_passes_sequential_replay(strict_qos_run):
    users, constraints, deployment = strict_qos_run
    assert deployment.commits
    assert all(record.qos_ok for record in deployment.commits)
    assert validate_deployment(deployment, users, constraints, PARAMS,
                               sequential_qos=True, require_enclosure=True) == []


def test_users_left_out_fail_alone_against_the_earlier_fleet(strict_qos_run):
    users, constraints, deployment = strict_qos_run
    positions = positions_array(users)

    def key(row):
        return (positions[row, 0], positions[row, 1], row)

    # Seeds are taken in increasing (x, y, row) order
    seed_keys = [key(record.seed_user) for record in deployment.commits]
    assert seed_keys == sorted(seed_keys)
    stopped_at_k_max = len(deployment.uavs) >= constraints.k_max

    for row in range(len(users)):
        if row in deployment.association or (stopped_at_k_max and key(row) > seed_keys[-1]):
            continue
        fleet = CommittedFleet(positions, constraints, PARAMS)
        for uav, seed_key in zip(deployment.uavs, seed_keys):
            if seed_key > key(row):
                break
            fleet.commit(uav.pos, list(uav.served))
        lone = Circle(Point2(*positions[row]), 0.0)
        check = evaluate_cluster(positions[[row]], lone, constraints, PARAMS, fleet, fleet.ambient[[row]])
        assert check.verdict is Verdict.QOS


# ---------------- Protection of earlier clusters ----------------

def test_fleet_flags_placements_that_harm_served_users():
    constraints = DeploymentConstraints(r_min_rate=50e6, c_backhaul=50e6)
    fleet = CommittedFleet(np.array([[0.0, 0.0], [5.0, 0.0], [300.0, 300.0]]), constraints, PARAMS)
    assert fleet.commit((0.0, 0.0, 10.0), [0]) == 1
    assert fleet.protected.tolist() == [True, False, False]
    assert fleet.ambient[1] > 0.0
    assert fleet.ambient[2] == 0.0
    assert fleet.harms((5.0, 0.0, 10.0))
    assert not fleet.harms((300.0, 300.0, 10.0))


def test_check_feasibility_rejects_harmful_placement():
    constraints = DeploymentConstraints(r_min_rate=50e6, c_backhaul=50e6)
    positions = np.array([[0.0, 0.0], [5.0, 0.0]])
    fleet = CommittedFleet(positions, constraints, PARAMS)
    fleet.commit((0.0, 0.0, 10.0), [0])
    lone = Circle(Point2(5.0, 0.0), 0.0)
    assert check_feasibility([(5.0, 0.0)], lone, constraints, PARAMS, fleet) is Verdict.QOS
    assert check_feasibility([(5.0, 0.0)], lone, constraints, PARAMS, []) is Verdict.OK


@pytest.mark.parametrize("seed", [3, 7])
def test_users_satisfied_at_commit_stay_satisfied(seed):
    users = generate_users(ScenarioConfig(n_users=600, seed=seed))
    deployment = run_scope(users, CONSTRAINTS, PARAMS)
    positions = positions_array(users)
    final = user_rates(deployment, users, CONSTRAINTS, PARAMS)
    uav_xyh = deployment.uav_positions()
    loads = np.array(deployment.loads)

    for j, uav in enumerate(deployment.uavs):
        rows = list(uav.served)
        at_commit = association_rates(positions[rows], uav_xyh[:j + 1], np.full(len(rows), j),
                                      loads[:j + 1], PARAMS, CONSTRAINTS.theta_bw)
        for row, rate in zip(rows, at_commit):
            if rate >= CONSTRAINTS.r_min_rate * (1 + 1e-9):
                assert final[row] >= CONSTRAINTS.r_min_rate * (1 - 1e-9)
