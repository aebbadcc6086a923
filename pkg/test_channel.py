#!/usr/bin/env python3
"""Tests for the air-to-ground channel and beam geometry."""
import math

import numpy as np
import pytest

from channel import (SPEED_OF_LIGHT, ChannelParams, DeploymentConstraints, achievable_rate, association_rates,
                     coverage_radius, dbm_to_watts, elevation_angle_deg, free_space_loss_db, los_probability,
                     mean_path_loss_db, received_power, required_altitude, sinr)

PARAMS = ChannelParams()
THETA = math.radians(45)


def test_los_probability_at_elevation_a():
    assert los_probability(PARAMS.a, PARAMS) == 1.0 / (1.0 + PARAMS.a)


def test_los_probability_monotone_in_elevation():
    theta = np.linspace(1, 90, 50)
    p = los_probability(theta, PARAMS)
    assert np.all(np.diff(p) > 0)
    assert np.all((p > 0) & (p < 1))


def test_free_space_loss_reference_value():
    assert free_space_loss_db(100.0, 2e9) == pytest.approx(78.46, abs=0.01)


def test_free_space_loss_matches_formula():
    d = 250.0
    expected = 20 * math.log10(d) + 20 * math.log10(2e9) + 20 * math.log10(4 * math.pi / SPEED_OF_LIGHT)
    assert free_space_loss_db(d, 2e9) == pytest.approx(expected, rel=1e-12)


def test_mean_path_loss_between_los_and_nlos():
    fspl = free_space_loss_db(120.0, PARAMS.f_c)
    loss = mean_path_loss_db(120.0, 30.0, PARAMS)
    assert fspl + PARAMS.eta_los < loss < fspl + PARAMS.eta_nlos


def test_mean_path_loss_rejects_zero_distance():
    with pytest.raises(ValueError):
        mean_path_loss_db(0.0, 90.0, PARAMS)


def test_received_power_is_transmit_power_minus_loss():
    loss = mean_path_loss_db(100.0, 90.0, PARAMS)
    assert received_power(100.0, 90.0, PARAMS) == pytest.approx(PARAMS.p_t * 10 ** (-loss / 10), rel=1e-12)


def test_coverage_altitude_round_trip():
    for h in (10.0, 37.5, 100.0, 120.0):
        r = coverage_radius(h, THETA)
        assert required_altitude(r, THETA, 10.0) == pytest.approx(h, rel=1e-12)


def test_required_altitude_floors_at_h_min():
    assert required_altitude(0.0, THETA, 10.0) == 10.0
    assert required_altitude(2.0, THETA, 10.0) == 10.0


def test_elevation_angle():
    assert elevation_angle_deg((0, 0, 50), (0, 0)) == pytest.approx(90.0)
    assert elevation_angle_deg((0, 0, 50), (50, 0)) == pytest.approx(45.0)


def test_elevation_angle_degenerate():
    with pytest.raises(ValueError, match="degenerate geometry"):
        elevation_angle_deg((1, 1, 0), (1, 1))


def test_dbm_conversion():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert PARAMS.noise_density == pytest.approx(10 ** (-20.4))


def test_sinr_without_interferers_is_snr():
    uav = (0.0, 0.0, 50.0)
    user = (30.0, 40.0)
    share = PARAMS.bandwidth / 4
    d = math.sqrt(30 ** 2 + 40 ** 2 + 50 ** 2)
    signal = received_power(d, math.degrees(math.asin(50 / d)), PARAMS)
    assert sinr(user, 0, [uav], PARAMS, share) == pytest.approx(signal / (PARAMS.noise_density * share), rel=1e-12)


def test_sinr_invalid_serving_index():
    with pytest.raises(ValueError, match="invalid serving UAV index"):
        sinr((0, 0), 2, [(0, 0, 10)], PARAMS, 1e6)


def test_interferer_outside_footprint_is_ignored():
    user = (0.0, 0.0)
    uavs = [(0.0, 0.0, 50.0), (200.0, 0.0, 50.0)]  # second footprint radius 50 m, user 200 m away
    masked = sinr(user, 0, uavs, PARAMS, 1e6, theta_bw=THETA)
    alone = sinr(user, 0, uavs[:1], PARAMS, 1e6)
    unmasked = sinr(user, 0, uavs, PARAMS, 1e6)
    assert masked == pytest.approx(alone)
    assert unmasked < masked


def test_interferer_covering_the_user_counts():
    user = (0.0, 0.0)
    uavs = [(0.0, 0.0, 50.0), (20.0, 0.0, 50.0)]
    assert sinr(user, 0, uavs, PARAMS, 1e6, theta_bw=THETA) < sinr(user, 0, uavs[:1], PARAMS, 1e6)


def test_rate_decreases_with_load():
    uavs = [(0.0, 0.0, 60.0)]
    rates = [achievable_rate((20.0, 0.0), 0, uavs, n, PARAMS) for n in (1, 2, 5, 20)]
    assert all(a > b for a, b in zip(rates, rates[1:]))


def test_rate_rejects_zero_load():
    with pytest.raises(ValueError):
        achievable_rate((0, 0), 0, [(0, 0, 10)], 0, PARAMS)


def test_association_rates_match_scalar_path():
    rng = np.random.default_rng(4)
    users = rng.uniform(0, 300, size=(40, 2))
    uavs = np.column_stack((rng.uniform(0, 300, size=(5, 2)), rng.uniform(10, 120, size=5)))
    serving = rng.integers(0, 5, size=40)
    loads = np.bincount(serving, minlength=5)
    vec = association_rates(users, uavs, serving, loads, PARAMS, THETA)
    for i in range(40):
        scalar = achievable_rate(users[i], int(serving[i]), uavs, int(loads[serving[i]]), PARAMS, THETA)
        assert vec[i] == pytest.approx(scalar, rel=1e-9)


def test_association_rates_empty():
    assert association_rates(np.zeros((0, 2)), np.zeros((1, 3)) + 10, np.zeros(0), [0], PARAMS).size == 0


def test_constraints_gamma_max():
    c = DeploymentConstraints()
    assert c.gamma_max == 75
    assert DeploymentConstraints(r_min_rate=10e6).gamma_max == 15


@pytest.mark.parametrize("kwargs", [
    {"h_min": 0.0},
    {"h_min": 130.0},
    {"theta_bw": math.pi / 2},
    {"r_min_rate": 200e6},
    {"k_max": 0},
])
def test_constraints_reject_invalid(kwargs):
    with pytest.raises(ValueError):
        DeploymentConstraints(**kwargs)


def test_channel_params_reject_invalid():
    with pytest.raises(ValueError):
        ChannelParams(bandwidth=0.0)
    with pytest.raises(ValueError):
        ChannelParams(eta_los=30.0, eta_nlos=20.0)
