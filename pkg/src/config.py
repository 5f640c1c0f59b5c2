# -*- coding: utf-8 -*-
"""
This module loads and validates scenario configuration files. A scenario
file is a flat YAML mapping (see `configs/master_config.yml`); every key
has a documented default, unknown keys are rejected, and each value is
checked against its domain before a run starts.
"""
import math
from dataclasses import dataclass, fields, replace, asdict
from pathlib import Path

import numpy as np
import yaml

from src.errors import ConfigError, DegenerateGeometryError
from src.estimation import DoaNoiseLaw, StepMeanRule
from src.formation_control import check_spanning

SCENARIOS = ("single", "multi")

SINGLE_AGENT_POSITIONS = ((1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0))
MULTI_AGENT_POSITIONS = ((30.0, 30.0), (30.0, -30.0), (-30.0, -30.0), (-30.0, 30.0))
SINGLE_SOURCE_POSITIONS = ((30.0, 40.0),)
# Random sources spawn in a centred square of area 50 m^2.
SPAWN_HALF_WIDTH_M = math.sqrt(50.0) / 2.0

SCENARIO_DEFAULTS = {
    "single": {"duration_s": 20000.0, "agent_positions": SINGLE_AGENT_POSITIONS,
               "source_positions": SINGLE_SOURCE_POSITIONS},
    "multi": {"duration_s": 1000.0, "agent_positions": MULTI_AGENT_POSITIONS,
              "source_positions": None},
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    seed: int = 0
    runs: int = 1
    duration_s: float = None
    dt_s: float = 1e-3
    emit_trajectories: bool = True
    trajectory_decimation: int = 100
    # --- Acoustic world ---
    source_power_w: float = 1e8
    source_positions: tuple = None
    target_count: int = 3
    spawn_half_width_m: float = SPAWN_HALF_WIDTH_M
    array_radius_m: float = 0.1
    # --- Measurement noise and estimators ---
    sigma_d2: float = 0.01
    k_theta: float = 100.0
    step_mean_rule: str = StepMeanRule.PRECISION_WEIGHTED.value
    doa_noise_law: str = DoaNoiseLaw.VON_MISES.value
    # --- Switching ---
    p_thresh: float = 1e-4
    k_thresh: float = 1e-4
    settle_speed: float = 1e-3
    # --- Control ---
    leader_kp: float = 10.0
    leader_kd: float = 10.0
    follower_kp: float = 10.0
    follower_kd: float = 10.0
    cruise_speed: float = 0.2
    alpha: float = 1e6
    # --- Formation (single source) ---
    agent_positions: tuple = None
    leaders: tuple = (1, 3)
    doa_edges: tuple = ((2, 1), (4, 1))
    convergence_radius_m: float = 0.05
    stop_after_converged_s: float = 100.0
    # --- Exploration (multi source) ---
    beta: float = 4.0 * math.sqrt(1e13)
    gamma_s: float = 1.0
    k_v: float = 0.9
    k_r_escape: float = 1.1
    k_r_growth: float = 1.2
    r0: float = 3.1
    mu_s_thresh: float = 1.0
    r_tt: float = 1.5

    @property
    def horizon_steps(self):
        return int(round(self.duration_s / self.dt_s))


CONFIG_KEYS = tuple(f.name for f in fields(ScenarioConfig))

_POSITIVE = ("duration_s", "dt_s", "source_power_w", "spawn_half_width_m", "array_radius_m",
             "sigma_d2", "k_theta", "p_thresh", "k_thresh", "settle_speed", "leader_kp",
             "leader_kd", "follower_kp", "follower_kd", "cruise_speed", "alpha",
             "convergence_radius_m", "beta", "gamma_s", "r0", "mu_s_thresh", "r_tt")
_POSITIVE_INT = ("runs", "trajectory_decimation", "target_count")


def _as_float(key, value):
    if isinstance(value, bool):
        raise ConfigError(key, f"expected a number, got {value!r}")
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {value!r}") from None
    if not math.isfinite(number):
        raise ConfigError(key, f"must be finite, got {value!r}")
    return number


def _as_int(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(key, f"expected an integer, got {value!r}")
    return int(value)


def _as_points(key, value, allow_empty=False):
    try:
        points = tuple((_as_float(key, p[0]), _as_float(key, p[1])) for p in value)
        if any(len(p) != 2 for p in value):
            raise TypeError
    except (TypeError, IndexError, KeyError):
        raise ConfigError(key, f"expected a list of [x, y] pairs, got {value!r}") from None
    if not points and not allow_empty:
        raise ConfigError(key, "needs at least one point")
    return points


def _as_bool(key, value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("on", "off", "true", "false"):
        return value.lower() in ("on", "true")
    raise ConfigError(key, f"expected on/off, got {value!r}")


def build_config(mapping):
    """Validates a raw mapping and returns a fully-defaulted ScenarioConfig."""
    if not isinstance(mapping, dict):
        raise ConfigError(None, "top level must be a key-value mapping")
    unknown = sorted(set(mapping) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    if "scenario" not in mapping:
        raise ConfigError("scenario", "missing required key")
    scenario = mapping["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigError("scenario", f"must be one of {SCENARIOS}, got {scenario!r}")

    values = dict(SCENARIO_DEFAULTS[scenario])
    values.update({k: v for k, v in mapping.items() if v is not None or k == "source_positions"})
    if values.get("duration_s") is None:
        values["duration_s"] = SCENARIO_DEFAULTS[scenario]["duration_s"]
    return validate_config(ScenarioConfig(**values))


def validate_config(config):
    """Normalizes types and checks every parameter's domain."""
    v = asdict(config)
    for key in _POSITIVE:
        v[key] = _as_float(key, v[key])
        if v[key] <= 0:
            raise ConfigError(key, f"must be > 0, got {v[key]!r}")
    for key in _POSITIVE_INT:
        v[key] = _as_int(key, v[key])
        if v[key] < 1:
            raise ConfigError(key, f"must be >= 1, got {v[key]!r}")
    v["seed"] = _as_int("seed", v["seed"])
    if v["seed"] < 0:
        raise ConfigError("seed", "must be >= 0")
    v["emit_trajectories"] = _as_bool("emit_trajectories", v["emit_trajectories"])
    v["stop_after_converged_s"] = _as_float("stop_after_converged_s", v["stop_after_converged_s"])
    if v["stop_after_converged_s"] < 0:
        raise ConfigError("stop_after_converged_s", "must be >= 0 (0 disables early stop)")

    v["k_v"] = _as_float("k_v", v["k_v"])
    if not 0.0 < v["k_v"] < 1.0:
        raise ConfigError("k_v", f"must satisfy 0 < k_v < 1, got {v['k_v']!r}")
    v["k_r_escape"] = _as_float("k_r_escape", v["k_r_escape"])
    if v["k_r_escape"] < 1.0:
        raise ConfigError("k_r_escape", f"must be >= 1, got {v['k_r_escape']!r}")
    v["k_r_growth"] = _as_float("k_r_growth", v["k_r_growth"])
    if v["k_r_growth"] <= 1.0:
        raise ConfigError("k_r_growth", f"must be > 1, got {v['k_r_growth']!r}")

    try:
        v["step_mean_rule"] = StepMeanRule(v["step_mean_rule"]).value
    except ValueError:
        choices = [rule.value for rule in StepMeanRule]
        raise ConfigError("step_mean_rule", f"must be one of {choices}") from None
    try:
        v["doa_noise_law"] = DoaNoiseLaw(v["doa_noise_law"]).value
    except ValueError:
        choices = [law.value for law in DoaNoiseLaw]
        raise ConfigError("doa_noise_law", f"must be one of {choices}") from None

    v["agent_positions"] = _as_points("agent_positions", v["agent_positions"])
    if v["source_positions"] is not None:
        v["source_positions"] = _as_points("source_positions", v["source_positions"])
    elif v["scenario"] == "single":
        raise ConfigError("source_positions", "the single-source scenario needs an explicit source")

    if v["scenario"] == "single":
        _validate_formation(v)
    else:
        v["leaders"] = tuple(v["leaders"])
        v["doa_edges"] = tuple(tuple(e) for e in v["doa_edges"])
    return ScenarioConfig(**v)


def _validate_formation(v):
    n = len(v["agent_positions"])
    if n != 4:
        raise ConfigError("agent_positions", f"the formation is the four-agent square, got {n} agents")
    try:
        leaders = tuple(_as_int("leaders", i) for i in v["leaders"])
        edges = tuple((_as_int("doa_edges", e[0]), _as_int("doa_edges", e[1])) for e in v["doa_edges"])
    except (TypeError, IndexError):
        raise ConfigError("doa_edges", "expected a list of [i, j] agent pairs") from None
    if len(set(leaders)) < 2 or not all(1 <= i <= n for i in leaders):
        raise ConfigError("leaders", f"needs at least two distinct agents in 1..{n}, got {list(leaders)}")
    if not all(1 <= i <= n and 1 <= j <= n and i != j for i, j in edges):
        raise ConfigError("doa_edges", f"edges must join two distinct agents in 1..{n}")
    try:
        check_spanning(np.array(v["agent_positions"]), [(i - 1, j - 1) for i, j in edges])
    except DegenerateGeometryError as exc:
        raise ConfigError("doa_edges", str(exc)) from None
    v["leaders"], v["doa_edges"] = leaders, edges


def load_config(path, overrides=None):
    """Reads, defaults and validates a scenario file; `overrides` win over file values."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(None, f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            mapping = yaml.safe_load(f) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(None, f"could not parse {path}: {exc}") from None
    if not isinstance(mapping, dict):
        raise ConfigError(None, f"{path} must contain a key-value mapping")
    mapping.update(overrides or {})
    return build_config(mapping)


def apply_overrides(config, **overrides):
    """Returns a re-validated copy with the non-None overrides applied."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    unknown = sorted(set(changes) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    return validate_config(replace(config, **changes))


def config_to_mapping(config):
    """Plain YAML-ready mapping of every effective parameter."""
    mapping = {}
    for key, value in asdict(config).items():
        if isinstance(value, tuple):
            value = [list(item) if isinstance(item, tuple) else item for item in value]
        mapping[key] = value
    return mapping


def dump_config(config):
    """YAML text of the effective configuration, reloadable by load_config."""
    return yaml.safe_dump(config_to_mapping(config), sort_keys=False)
