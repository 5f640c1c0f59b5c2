# -*- coding: utf-8 -*-
import math

import pytest
import yaml

from src.config import (
    MULTI_AGENT_POSITIONS,
    SINGLE_AGENT_POSITIONS,
    SPAWN_HALF_WIDTH_M,
    apply_overrides,
    build_config,
    config_to_mapping,
    dump_config,
    load_config,
)
from src.errors import ConfigError
from src.utils import get_project_root


def test_single_defaults():
    config = build_config({'scenario': 'single'})
    assert config.duration_s == 20000.0
    assert config.horizon_steps == 20_000_000
    assert config.agent_positions == SINGLE_AGENT_POSITIONS
    assert config.source_positions == ((30.0, 40.0),)
    assert config.leaders == (1, 3)
    assert (config.sigma_d2, config.k_theta) == (0.01, 100.0)
    assert (config.p_thresh, config.k_thresh) == (1e-4, 1e-4)


def test_multi_defaults():
    config = build_config({'scenario': 'multi'})
    assert config.duration_s == 1000.0
    assert config.agent_positions == MULTI_AGENT_POSITIONS
    assert config.source_positions is None
    assert config.beta == pytest.approx(4.0 * math.sqrt(1e13))
    assert (config.k_v, config.k_r_escape, config.k_r_growth, config.r0) == (0.9, 1.1, 1.2, 3.1)
    assert (2 * config.spawn_half_width_m) ** 2 == pytest.approx(50.0)
    assert config.doa_noise_law == "von_mises"


def test_scenario_is_required():
    with pytest.raises(ConfigError) as info:
        build_config({'seed': 1})
    assert info.value.key == "scenario"


def test_unknown_key_is_named():
    with pytest.raises(ConfigError) as info:
        build_config({'scenario': 'single', 'sigma_d': 0.1})
    assert info.value.key == "sigma_d"
    assert "sigma_d" in str(info.value)


@pytest.mark.parametrize("key, value", [
    ("k_v", 1.5),
    ("k_v", 0.0),
    ("k_r_escape", 0.9),
    ("k_r_growth", 1.0),
    ("sigma_d2", 0.0),
    ("k_theta", -1.0),
    ("dt_s", math.nan),
    ("runs", 0),
    ("seed", -3),
    ("trajectory_decimation", 2.5),
    ("step_mean_rule", "median"),
    ("doa_noise_law", "cauchy"),
])
def test_out_of_domain_values_are_rejected(key, value):
    with pytest.raises(ConfigError) as info:
        build_config({'scenario': 'single', key: value})
    assert info.value.key == key


def test_single_source_needs_an_explicit_source():
    with pytest.raises(ConfigError) as info:
        build_config({'scenario': 'single', 'source_positions': None})
    assert info.value.key == "source_positions"


def test_formation_must_be_the_square():
    with pytest.raises(ConfigError) as info:
        build_config({'scenario': 'single', 'agent_positions': [[0, 0], [1, 0], [0, 1]]})
    assert info.value.key == "agent_positions"


def test_collinear_doa_edges_are_rejected():
    with pytest.raises(ConfigError) as info:
        build_config({'scenario': 'single', 'doa_edges': [[1, 3], [3, 1]]})
    assert info.value.key == "doa_edges"


def test_leaders_must_be_distinct():
    with pytest.raises(ConfigError) as info:
        build_config({'scenario': 'single', 'leaders': [2, 2]})
    assert info.value.key == "leaders"


def test_emit_trajectories_accepts_on_off():
    assert build_config({'scenario': 'single', 'emit_trajectories': 'off'}).emit_trajectories is False
    assert build_config({'scenario': 'single', 'emit_trajectories': 'on'}).emit_trajectories is True


def test_doa_noise_law_accepts_the_wrapped_normal():
    assert build_config({'scenario': 'single', 'doa_noise_law': 'wrapped_normal'}).doa_noise_law == "wrapped_normal"


def test_overrides_are_revalidated():
    config = build_config({'scenario': 'multi'})
    assert apply_overrides(config, target_count=7, seed=None).target_count == 7
    with pytest.raises(ConfigError):
        apply_overrides(config, k_v=2.0)
    with pytest.raises(ConfigError):
        apply_overrides(config, flux=1.0)


def test_echo_reloads_to_the_same_config(tmp_path):
    config = build_config({'scenario': 'single', 'sigma_d2': 1.0, 'k_theta': 10.0, 'seed': 9})
    echo = tmp_path / "config_echo.yml"
    echo.write_text(dump_config(config), encoding="utf-8")
    assert load_config(echo) == config


def test_mapping_is_plain_yaml():
    mapping = config_to_mapping(build_config({'scenario': 'single'}))
    assert mapping["agent_positions"][0] == [1.0, 1.0]
    assert yaml.safe_load(yaml.safe_dump(mapping))["doa_edges"] == [[2, 1], [4, 1]]


def test_file_overrides_win(tmp_path):
    path = tmp_path / "scenario.yml"
    path.write_text("scenario: single\nseed: 4\nsigma_d2: 0.1\n", encoding="utf-8")
    config = load_config(path, {'seed': 11})
    assert (config.seed, config.sigma_d2) == (11, 0.1)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.yml")


def test_unparseable_file(tmp_path):
    path = tmp_path / "broken.yml"
    path.write_text("scenario: [single\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="could not parse"):
        load_config(path)


def test_non_mapping_file(tmp_path):
    path = tmp_path / "list.yml"
    path.write_text("- single\n- multi\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(path)


@pytest.mark.parametrize("name, scenario", [("master_config.yml", "single"), ("multi_source.yml", "multi")])
def test_shipped_configs_load(name, scenario):
    config = load_config(get_project_root() / "configs" / name)
    assert config.scenario == scenario
    assert config.doa_noise_law == "von_mises"
    assert config.spawn_half_width_m == pytest.approx(SPAWN_HALF_WIDTH_M)
