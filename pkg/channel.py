#!/usr/bin/env python3
"""
Probabilistic air-to-ground channel and beam geometry.

LoS probability is a sigmoid in the elevation angle; the mean path loss mixes
free-space loss plus LoS/NLoS excess attenuation. Downlink rates use Shannon
capacity over an equal split of the band among a UAV's users, with every other
UAV whose beam footprint covers the user counted as an interferer.

Scalar operations accept plain floats; the batch functions at the end of the
module take numpy arrays.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Horizontal slack when deciding whether a user sits inside a beam footprint
FOOTPRINT_EPS = 1e-9


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    """Radio constants. Defaults are the urban values of the reference setup."""
    a: float = 12.08
    b: float = 0.11
    eta_los: float = 1.6           # dB
    eta_nlos: float = 23.0         # dB
    f_c: float = 2e9               # Hz
    bandwidth: float = 20e6        # Hz
    p_t: float = 0.1               # W
    noise_density: float = dbm_to_watts(-174.0)  # W/Hz
    p_hover: float = 150.0         # W

    def __post_init__(self):
        for name in ('a', 'b', 'f_c', 'bandwidth', 'p_t', 'noise_density', 'p_hover'):
            if not getattr(self, name) > 0:
                raise ValueError(f"channel.{name} must be > 0, got {getattr(self, name)}")
        if self.eta_nlos < self.eta_los:
            raise ValueError("channel.eta_nlos must be >= channel.eta_los")


@dataclass(frozen=True)
class DeploymentConstraints:
    """Fleet limits shared by every placement algorithm.

    gamma_max is derived as floor(c_backhaul / r_min_rate).
    """
    h_min: float = 10.0                      # m
    h_max: float = 120.0                     # m
    theta_bw: float = math.radians(45.0)     # rad, half-power half-beamwidth
    r_min_rate: float = 2e6                  # bps
    c_backhaul: float = 150e6                # bps
    k_max: int = 100
    gamma_max: int = field(init=False)

    def __post_init__(self):
        if not 0 < self.h_min <= self.h_max:
            raise ValueError(f"need 0 < h_min <= h_max, got {self.h_min}, {self.h_max}")
        if not 0 < self.theta_bw < math.pi / 2:
            raise ValueError(f"theta_bw must lie in (0, pi/2), got {self.theta_bw}")
        if not self.r_min_rate > 0:
            raise ValueError("r_min_rate must be > 0")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        gamma = int(math.floor(self.c_backhaul / self.r_min_rate))
        if gamma < 1:
            raise ValueError(
                f"c_backhaul / r_min_rate must be >= 1, got {self.c_backhaul} / {self.r_min_rate}")
        object.__setattr__(self, 'gamma_max', gamma)


# ---------------- Geometry of the beam ----------------

def coverage_radius(h: float, theta_bw: float) -> float:
    """Ground radius covered from altitude h: r = h tan(theta_bw)."""
    return h * math.tan(theta_bw)


def required_altitude(r_c: float, theta_bw: float, h_min: float) -> float:
    """Lowest altitude whose footprint covers radius r_c, floored at h_min."""
    return max(h_min, r_c / math.tan(theta_bw))


def elevation_angle_deg(uav_pos: Sequence[float], user_pos: Sequence[float]) -> float:
    """Elevation angle of the UAV seen from the user, in degrees.

    Args:
        uav_pos: (x, y, h)
        user_pos: (x, y)

    Returns:
        Angle in (0, 90]

    Raises:
        ValueError: If the UAV and user coincide
    """
    dx = uav_pos[0] - user_pos[0]
    dy = uav_pos[1] - user_pos[1]
    h = uav_pos[2]
    d = math.sqrt(dx * dx + dy * dy + h * h)
    if d <= 0.0:
        raise ValueError("degenerate geometry")
    return math.degrees(math.asin(min(1.0, h / d)))


# ---------------- Path loss ----------------

def los_probability(theta_deg, params: ChannelParams):
    """Sigmoid LoS probability; works on floats and numpy arrays."""
    return 1.0 / (1.0 + params.a * np.exp(-params.b * (theta_deg - params.a)))


def free_space_loss_db(distance_3d, f_c: float):
    return 20.0 * np.log10(4.0 * math.pi * f_c * distance_3d / SPEED_OF_LIGHT)


def mean_path_loss_db(distance_3d, theta_deg, params: ChannelParams):
    """Average of LoS and NLoS losses weighted by the LoS probability.

    Raises:
        ValueError: If any distance is not positive
    """
    if np.any(np.asarray(distance_3d) <= 0):
        raise ValueError("distance must be positive")
    fspl = free_space_loss_db(distance_3d, params.f_c)
    p_los = los_probability(theta_deg, params)
    return p_los * (fspl + params.eta_los) + (1.0 - p_los) * (fspl + params.eta_nlos)


def received_power(distance_3d, theta_deg, params: ChannelParams):
    """Received power in watts: p_t * 10^(-L/10)."""
    return params.p_t * 10.0 ** (-mean_path_loss_db(distance_3d, theta_deg, params) / 10.0)


def _link_power(uav: Sequence[float], user: Sequence[float], params: ChannelParams) -> float:
    dx = uav[0] - user[0]
    dy = uav[1] - user[1]
    d = math.sqrt(dx * dx + dy * dy + uav[2] * uav[2])
    return float(received_power(d, elevation_angle_deg(uav, user), params))


def _in_footprint(uav: Sequence[float], user: Sequence[float], theta_bw: float) -> bool:
    return math.hypot(uav[0] - user[0], uav[1] - user[1]) <= coverage_radius(uav[2], theta_bw) + FOOTPRINT_EPS


# ---------------- SINR and rate ----------------

def sinr(user: Sequence[float], serving_uav_index: int, uavs: Sequence[Sequence[float]],
         params: ChannelParams, bandwidth_share: float, theta_bw: Optional[float] = None) -> float:
    """Downlink SINR of one user.

    Args:
        user: (x, y) of the user
        serving_uav_index: Index of the serving UAV in uavs
        uavs: (x, y, h) of every active UAV
        params: Channel constants
        bandwidth_share: Bandwidth of the user's slice in Hz (sets the noise power)
        theta_bw: When given, UAVs whose footprint misses the user do not interfere

    Returns:
        Linear SINR, strictly positive

    Raises:
        ValueError: If the serving index is out of range or the share is not positive
    """
    if not 0 <= serving_uav_index < len(uavs):
        raise ValueError("invalid serving UAV index")
    if not bandwidth_share > 0:
        raise ValueError("bandwidth_share must be > 0")

    signal = _link_power(uavs[serving_uav_index], user, params)
    interference = 0.0
    for k, uav in enumerate(uavs):
        if k == serving_uav_index:
            continue
        if theta_bw is not None and not _in_footprint(uav, user, theta_bw):
            continue
        interference += _link_power(uav, user, params)
    return signal / (interference + params.noise_density * bandwidth_share)


def shannon_rate(sinr_value, bandwidth_share):
    """Shannon capacity in bps for the given slice."""
    return bandwidth_share * np.log2(1.0 + sinr_value)


def achievable_rate(user: Sequence[float], serving_uav_index: int, uavs: Sequence[Sequence[float]],
                    n_served: int, params: ChannelParams, theta_bw: Optional[float] = None) -> float:
    """Rate of a user whose UAV splits the band equally among n_served users."""
    if n_served < 1:
        raise ValueError("n_served must be >= 1")
    share = params.bandwidth / n_served
    return float(shannon_rate(sinr(user, serving_uav_index, uavs, params, share, theta_bw), share))


def link_powers(user_xy: np.ndarray, uav_xyh: np.ndarray, params: ChannelParams):
    """Received power of every (user, UAV) pair.

    Returns:
        (power, horizontal): two (n, k) arrays, watts and ground distance in meters
    """
    user_xy = np.asarray(user_xy, dtype=float).reshape(-1, 2)
    uav_xyh = np.asarray(uav_xyh, dtype=float).reshape(-1, 3)
    dx = user_xy[:, None, 0] - uav_xyh[None, :, 0]
    dy = user_xy[:, None, 1] - uav_xyh[None, :, 1]
    horizontal = np.hypot(dx, dy)
    h = np.broadcast_to(uav_xyh[None, :, 2], horizontal.shape)
    d3 = np.sqrt(horizontal ** 2 + h ** 2)
    theta = np.degrees(np.arcsin(np.minimum(1.0, h / d3)))
    return received_power(d3, theta, params), horizontal


def footprint_mask(horizontal: np.ndarray, uav_xyh: np.ndarray, theta_bw: float) -> np.ndarray:
    """True where the user sits inside the UAV's beam footprint."""
    uav_xyh = np.asarray(uav_xyh, dtype=float).reshape(-1, 3)
    return horizontal <= uav_xyh[None, :, 2] * math.tan(theta_bw) + FOOTPRINT_EPS


def footprint_interference(user_xy: np.ndarray, uav_xyh: np.ndarray, params: ChannelParams,
                           theta_bw: float) -> np.ndarray:
    """Summed power reaching each user from every UAV whose footprint covers it.

    Returns:
        (n,) watts; zeros when uav_xyh is empty
    """
    user_xy = np.asarray(user_xy, dtype=float).reshape(-1, 2)
    uav_xyh = np.asarray(uav_xyh, dtype=float).reshape(-1, 3)
    if uav_xyh.shape[0] == 0:
        return np.zeros(user_xy.shape[0])
    power, horizontal = link_powers(user_xy, uav_xyh, params)
    return np.where(footprint_mask(horizontal, uav_xyh, theta_bw), power, 0.0).sum(axis=1)


def slice_rate(signal, interference, n_served, params: ChannelParams):
    """Shannon rate from precomputed powers, the band split among n_served users."""
    share = params.bandwidth / np.asarray(n_served, dtype=float)
    return shannon_rate(signal / (interference + params.noise_density * share), share)


def association_rates(user_xy: np.ndarray, uav_xyh: np.ndarray, serving: np.ndarray,
                      loads: np.ndarray, params: ChannelParams,
                      theta_bw: Optional[float] = None) -> np.ndarray:
    """Vectorized rates for a batch of associated users.

    Args:
        user_xy: (n, 2) user positions
        uav_xyh: (k, 3) UAV positions
        serving: (n,) index of each user's serving UAV
        loads: (k,) number of users on each UAV
        params: Channel constants
        theta_bw: Beam half-width; None lets every other UAV interfere

    Returns:
        (n,) rates in bps
    """
    user_xy = np.asarray(user_xy, dtype=float).reshape(-1, 2)
    uav_xyh = np.asarray(uav_xyh, dtype=float).reshape(-1, 3)
    serving = np.asarray(serving, dtype=int)
    n = user_xy.shape[0]
    if n == 0:
        return np.zeros(0)

    power, horizontal = link_powers(user_xy, uav_xyh, params)
    rows = np.arange(n)
    signal = power[rows, serving]
    interferers = np.ones_like(power, dtype=bool)
    interferers[rows, serving] = False
    if theta_bw is not None:
        interferers &= footprint_mask(horizontal, uav_xyh, theta_bw)
    interference = np.where(interferers, power, 0.0).sum(axis=1)
    return slice_rate(signal, interference, np.asarray(loads, dtype=float)[serving], params)
