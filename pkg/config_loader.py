#!/usr/bin/env python3
"""
Configuration loader with YAML support and environment variable overrides.

The packaged config.yaml holds every known key with its default; a user file
only needs the keys it changes. Unknown keys are rejected.
"""
import copy
import math
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from baselines import SolverOptions
from channel import ChannelParams, DeploymentConstraints, dbm_to_watts
from scenario import ScenarioConfig

DEFAULT_CONFIG_PATH = Path(__file__).parent / 'config.yaml'
ENV_PREFIX = 'DEPLOY_'


class ConfigError(ValueError):
    """Configuration file or override names something that does not exist."""


class Config:
    """Configuration with dot notation access and env overrides."""

    def __init__(self, config_dict: Dict[str, Any]):
        self._config = config_dict

    def get(self, key: str, default: Any = None) -> Any:
        """Get config value with dot notation.

        Args:
            key: Dot-separated key (e.g., 'channel.p_hover')
            default: Default value if key not found

        Returns:
            Config value or default
        """
        value = self._config
        for k in key.split('.'):
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default
        return value

    def set(self, key: str, value: Any):
        """Set an existing config value with dot notation.

        Raises:
            ConfigError: If the key is not a known key
        """
        section, _, name = key.partition('.')
        if section not in self._config or name not in self._config[section]:
            raise ConfigError(f"unknown config key: {key}")
        self._config[section][name] = value

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self._config.get(name, {}))

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._config)


def _load_yaml(path: Path) -> Dict[str, Any]:
    with open(path, 'r') as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def _merge_checked(base: Dict[str, Any], overrides: Dict[str, Any], origin: str):
    for section, values in overrides.items():
        if section not in base:
            raise ConfigError(f"{origin}: unknown config section '{section}'")
        if not isinstance(values, dict):
            raise ConfigError(f"{origin}: section '{section}' must be a mapping")
        for key, value in values.items():
            if key not in base[section]:
                raise ConfigError(f"{origin}: unknown config key '{section}.{key}'")
            base[section][key] = value


def _env_overrides(environ: Dict[str, str]) -> Dict[str, Dict[str, Any]]:
    """Collect DEPLOY_<SECTION>_<KEY>=value overrides.

    Example: DEPLOY_CHANNEL_P_HOVER=120 sets channel.p_hover. DEPLOY_WORKERS
    sets experiment.workers. Values are parsed as YAML scalars.
    """
    out: Dict[str, Dict[str, Any]] = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):].lower()
        if rest == 'workers':
            section, key = 'experiment', 'workers'
        else:
            section, _, key = rest.partition('_')
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            value = raw
        out.setdefault(section, {})[key] = value
    return out


def load_config(config_path: Optional[Path] = None, environ: Optional[Dict[str, str]] = None) -> Config:
    """Load configuration from YAML (or JSON) with env overrides.

    Args:
        config_path: File with the keys to change (default: packaged config.yaml only)
        environ: Environment to read overrides from (default: os.environ)

    Returns:
        Config object with every known key present

    Raises:
        ConfigError: On unknown sections or keys
    """
    config_dict = _load_yaml(DEFAULT_CONFIG_PATH)
    if config_path is not None:
        _merge_checked(config_dict, _load_yaml(Path(config_path)), str(config_path))

    env = os.environ if environ is None else environ
    overrides = _env_overrides(dict(env))
    # Unrelated DEPLOY_* variables are common in CI; only known sections are checked
    overrides = {s: v for s, v in overrides.items() if s in config_dict}
    _merge_checked(config_dict, overrides, 'environment')
    return Config(config_dict)


# ---------------- Typed builders ----------------

def build_scenario_config(config: Config) -> ScenarioConfig:
    s = config.section('scenario')
    return ScenarioConfig(
        area_width=float(s['area_width']),
        area_height=float(s['area_height']),
        n_users=int(s['n_users']),
        n_parents=int(s['n_parents']),
        cluster_radius=float(s['cluster_radius']),
        seed=int(s['seed']),
        alpha=float(s['alpha']),
        mean_velocity=tuple(float(v) for v in s['mean_velocity']),
        noise_sigma=float(s['noise_sigma']),
        dt=float(s['dt']),
    )


def build_channel_params(config: Config) -> ChannelParams:
    c = config.section('channel')
    return ChannelParams(
        a=float(c['a']),
        b=float(c['b']),
        eta_los=float(c['eta_los']),
        eta_nlos=float(c['eta_nlos']),
        f_c=float(c['f_c']),
        bandwidth=float(c['bandwidth']),
        p_t=float(c['p_t']),
        noise_density=dbm_to_watts(float(c['noise_density_dbm_hz'])),
        p_hover=float(c['p_hover']),
    )


def build_constraints(config: Config) -> DeploymentConstraints:
    c = config.section('constraints')
    return DeploymentConstraints(
        h_min=float(c['h_min']),
        h_max=float(c['h_max']),
        theta_bw=math.radians(float(c['theta_bw_deg'])),
        r_min_rate=float(c['r_min_rate']),
        c_backhaul=float(c['c_backhaul']),
        k_max=int(c['k_max']),
    )


def build_solver_options(config: Config, seed: Optional[int] = None) -> SolverOptions:
    b = config.section('baselines')
    fixed = b.get('fixed_altitude')
    return SolverOptions(
        seed=int(config.get('scenario.seed', 0) if seed is None else seed),
        geometry_seed=int(config.get('experiment.geometry_seed', 0)),
        area=(float(config.get('scenario.area_width')), float(config.get('scenario.area_height'))),
        ccs_altitude=float(b['ccs_altitude']),
        fixed_altitude=None if fixed is None else float(fixed),
        kmeans_max_iter=int(b['kmeans_max_iter']),
    )


def build_experiment_config(config: Config):
    """ExperimentConfig from the experiment section plus the typed base sections."""
    from harness import ExperimentConfig, SweepAxis

    e = config.section('experiment')
    return ExperimentConfig(
        sweep_axis=SweepAxis(str(e['sweep_axis'])),
        sweep_values=tuple(float(v) for v in e['sweep_values']),
        algorithms=tuple(str(a) for a in e['algorithms']),
        trials=int(e['trials']),
        scenario=build_scenario_config(config),
        channel=build_channel_params(config),
        constraints=build_constraints(config),
        options=build_solver_options(config),
        output_path=Path(e['output_path']),
        workers=int(e['workers']),
        mobility_steps=int(e['mobility_steps']),
    )
