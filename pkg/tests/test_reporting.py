# -*- coding: utf-8 -*-
import json

import numpy as np
import pandas as pd
import pytest

from src.config import build_config, load_config
from src.reporting import (
    EVENT_COLUMNS,
    detections_frame,
    save_run_outputs,
    save_sweep_outputs,
)
from src.sim_engine import RunMetrics, SimEvent
from src.swarm_exploration import ExploredArea


@pytest.fixture
def single_metrics():
    events = [
        SimEvent(0.1, 0, "move_start", 0.0, 0.0, {"step_target_m": 35.2, "doa_rad": 0.93}),
        SimEvent(176.0, 0, "settle_start", 21.1, 28.1, {"traveled_m": 35.2, "step_target_m": 35.2}),
        SimEvent(181.0, 0, "listen_start", 21.1, 28.2, {}),
    ]
    centroid = pd.DataFrame({'time_s': [0.0, 0.1], 'distance_m': [50.0, 50.0], 'mode': ['listening', 'moving']})
    return RunMetrics(scenario="single", seed=4, simulated_time_s=300.0, sources=np.array([[30.0, 40.0]]),
                      events=events, convergence_time_s=251.5, listening_time_s=0.8, settle_time_s=40.0,
                      phase_count=8, first_move_time_s=0.1, final_distance_m=0.01, stopped_early=True,
                      centroid_distance=centroid)


@pytest.fixture
def multi_metrics():
    events = [SimEvent(12.0, 2, "detection", 5.2, 5.1, {"area_id": 0, "mu_s_m": np.float64(0.4)})]
    detections = [{"time_s": 12.0, "agent_id": 2, "x_m": 5.2, "y_m": 5.1, "area_id": 0, "mu_s_m": 0.4}]
    return RunMetrics(scenario="multi", seed=1, simulated_time_s=20.0, sources=np.array([[5.0, 5.0], [-9.0, 3.0]]),
                      events=events, first_move_time_s=None, detection_count=1, detection_log=detections,
                      explored_areas=[ExploredArea((5.2, 5.1), 3.1)])


def test_single_run_outputs(single_metrics, tmp_path):
    config = build_config({'scenario': 'single', 'seed': 4, 'emit_trajectories': False})
    paths = save_run_outputs(single_metrics, config, tmp_path)
    assert set(paths) == {'metrics_summary', 'summary_report', 'events', 'effective_config', 'centroid_distance'}

    summary = json.loads((tmp_path / "metrics_summary.json").read_text(encoding="utf-8"))
    assert summary['converged'] is True
    assert summary['convergence_time_s'] == 251.5
    assert summary['convergence_time_listening_only_s'] == pytest.approx(211.5)
    assert summary['mode_switches'] == 3

    events = pd.read_csv(tmp_path / "events.csv")
    assert list(events.columns) == EVENT_COLUMNS
    assert events['event'].tolist() == ["move_start", "settle_start", "listen_start"]
    assert json.loads(events['payload'].iloc[0]) == {"doa_rad": 0.93, "step_target_m": 35.2}

    report = (tmp_path / "summary_report.txt").read_text(encoding="utf-8")
    assert "Single-Source Formation Run Report" in report
    assert "Time of Convergence t_s: 251.500 s" in report
    assert "stopped early" in report
    assert report.rstrip().endswith("End of Report")

    assert load_config(tmp_path / "effective_config.yml") == config


def test_multi_run_outputs(multi_metrics, tmp_path):
    config = build_config({'scenario': 'multi', 'source_positions': [[5.0, 5.0], [-9.0, 3.0]],
                           'emit_trajectories': False})
    paths = save_run_outputs(multi_metrics, config, tmp_path)
    assert 'detections' in paths and 'centroid_distance' not in paths

    events = pd.read_csv(tmp_path / "events.csv")
    assert json.loads(events['payload'].iloc[0]) == {"area_id": 0, "mu_s_m": 0.4}

    report = (tmp_path / "summary_report.txt").read_text(encoding="utf-8")
    assert "Sources Located: 1 of 2" in report
    assert "First Move: n/a" in report


def test_detections_frame_is_one_long_table(multi_metrics):
    frame = detections_frame(multi_metrics)
    assert frame['kind'].tolist() == ['detection', 'source', 'source', 'explored_area']
    assert frame.loc[frame['kind'] == 'explored_area', 'radius_m'].iloc[0] == 3.1


def test_unconverged_summary_uses_null(single_metrics, tmp_path):
    single_metrics.convergence_time_s = None
    single_metrics.stopped_early = False
    save_run_outputs(single_metrics, build_config({'scenario': 'single', 'emit_trajectories': False}), tmp_path)
    summary = json.loads((tmp_path / "metrics_summary.json").read_text(encoding="utf-8"))
    assert summary['converged'] is False
    assert summary['convergence_time_s'] is None
    assert "Time of Convergence t_s: n/a" in (tmp_path / "summary_report.txt").read_text(encoding="utf-8")


def test_table1_sweep_outputs(tmp_path):
    runs = pd.DataFrame({'cell': [0, 1], 'run': [0, 0], 'seed': [1, 2], 'sigma_d2': [0.01, 0.01],
                         'k_theta': [100.0, 10.0], 't_s': [250.0, 260.0], 'converged': [True, True],
                         'listening_time_s': [1.0, 1.0], 'phase_count': [8, 8]})
    paths, summary = save_sweep_outputs(1, runs, tmp_path)
    assert len(summary) == 2
    assert {p.name for p in paths.values()} == {"table1_runs.csv", "table1_grid.csv", "table1_matrix.csv"}
    matrix = pd.read_csv(tmp_path / "table1_matrix.csv", index_col=0)
    assert matrix.shape == (1, 2)


def test_table2_sweep_outputs(tmp_path):
    runs = pd.DataFrame({'cell': [0, 0], 'run': [0, 1], 'seed': [1, 2], 'targets': [3, 3],
                         'detections': [2, 3], 'detection_events': [2, 4]})
    paths, summary = save_sweep_outputs(2, runs, tmp_path)
    assert summary['mean_detections'].tolist() == [2.5]
    assert (tmp_path / "table2_summary.csv").is_file()
