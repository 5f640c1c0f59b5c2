# -*- coding: utf-8 -*-
"""
This module is responsible for generating and saving all file-based outputs
of a run or a sweep: the JSON metrics summary, the plain-text summary
report, CSV tables of events, trajectories, centroid distance and
detections, and the effective-config echo. Every file is written through a
temp-file-and-rename so a crashed run never leaves a half-written output.
"""
import json
import math

import numpy as np
import pandas as pd

from src.analysis_engine import convergence_grid, summarize_convergence_sweep, summarize_detection_sweep
from src.config import dump_config
from src.utils import atomic_write

EVENT_COLUMNS = ['time_s', 'agent_id', 'event', 'x_m', 'y_m', 'payload']
DETECTION_COLUMNS = ['kind', 'id', 'time_s', 'agent_id', 'x_m', 'y_m', 'radius_m']


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return None if not math.isfinite(value) else float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def _clean(value):
    """Replaces non-finite floats by None so the JSON stays standard."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _write_csv(df, filepath):
    with atomic_write(filepath) as f:
        df.to_csv(f, index=False, float_format='%.6f')
    return filepath


def save_metrics_summary(metrics, output_dir):
    """Saves the scalar metrics of a run as JSON."""
    filepath = output_dir / "metrics_summary.json"
    with atomic_write(filepath) as f:
        json.dump(_clean(metrics.summary()), f, indent=2, default=_jsonable)
        f.write("\n")
    return filepath


def events_frame(metrics):
    rows = [(e.time_s, e.agent_id, e.kind, e.x_m, e.y_m, json.dumps(e.payload, default=_jsonable, sort_keys=True))
            for e in metrics.events]
    return pd.DataFrame(rows, columns=EVENT_COLUMNS)


def save_events(metrics, output_dir):
    """Saves the mode-switch and detection log."""
    return _write_csv(events_frame(metrics), output_dir / "events.csv")


def save_trajectory(metrics, output_dir):
    if metrics.trajectory is None:
        return None
    return _write_csv(metrics.trajectory, output_dir / "trajectory.csv")


def save_centroid_distance(metrics, output_dir):
    if metrics.centroid_distance is None:
        return None
    return _write_csv(metrics.centroid_distance, output_dir / "centroid_distance.csv")


def detections_frame(metrics):
    """Detection points, true sources and explored areas in one long table."""
    rows = []
    for i, d in enumerate(metrics.detection_log):
        rows.append(('detection', i, d['time_s'], d['agent_id'], d['x_m'], d['y_m'], np.nan))
    for i, (x, y) in enumerate(metrics.sources):
        rows.append(('source', i, np.nan, np.nan, float(x), float(y), np.nan))
    for i, area in enumerate(metrics.explored_areas):
        rows.append(('explored_area', i, np.nan, np.nan, area.center[0], area.center[1], area.radius))
    return pd.DataFrame(rows, columns=DETECTION_COLUMNS)


def save_detections(metrics, output_dir):
    return _write_csv(detections_frame(metrics), output_dir / "detections.csv")


def save_effective_config(config, output_dir):
    """Echoes every effective parameter; load_config reads it back unchanged."""
    filepath = output_dir / "effective_config.yml"
    with atomic_write(filepath) as f:
        f.write(dump_config(config))
    return filepath


def _fmt(value, spec=".3f", unit=" s"):
    return "n/a" if value is None else f"{value:{spec}}{unit}"


def save_summary_report(metrics, config, output_dir):
    """Saves the text summary report of a run."""
    filepath = output_dir / "summary_report.txt"
    title = "Single-Source Formation Run" if metrics.scenario == "single" else "Multi-Source Exploration Run"
    with atomic_write(filepath) as f:
        f.write(f"{title} Report\n")
        f.write(f"Seed: {metrics.seed}\n")
        f.write(f"Simulated Time: {metrics.simulated_time_s:.3f} s (horizon {config.duration_s:.1f} s, dt {config.dt_s} s)\n")
        f.write(f"Report Generation Date: {pd.Timestamp.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
        f.write("="*80 + "\n\n")

        f.write("I. Scenario:\n")
        f.write(f"  Measurement Noise: sigma_d^2 = {config.sigma_d2}, k_theta = {config.k_theta}\n")
        f.write(f"  Switching Thresholds: P <= {config.p_thresh}, 1/K <= {config.k_thresh}\n")
        f.write(f"  Agents: {len(config.agent_positions)}\n")
        for i, (x, y) in enumerate(metrics.sources, start=1):
            f.write(f"  Source {i}: ({x:.3f}, {y:.3f}) m\n")
        f.write("\n")

        switches = metrics.mode_switch_log
        f.write("II. Mode Switching:\n")
        f.write(f"  Mode Switch Events: {len(switches)}\n")
        f.write(f"  Movement Phases Started: {sum(1 for e in switches if e.kind == 'move_start')}\n")
        f.write(f"  First Move: {_fmt(metrics.first_move_time_s)}\n\n")

        if metrics.scenario == "single":
            f.write("III. Convergence:\n")
            f.write(f"  Converged: {'yes' if metrics.converged else 'no'}"
                    f" (radius {config.convergence_radius_m} m)\n")
            f.write(f"  Time of Convergence t_s: {_fmt(metrics.convergence_time_s)}\n")
            f.write(f"  Listening Time before t_s: {_fmt(metrics.listening_time_s)}\n")
            f.write(f"  Settling Time before t_s: {_fmt(metrics.settle_time_s)}\n")
            f.write(f"  Movement Phases before t_s: {metrics.phase_count}\n")
            f.write(f"  Final Centroid Distance: {_fmt(metrics.final_distance_m, '.4f', ' m')}\n")
            if metrics.stopped_early:
                f.write(f"  Run stopped early after {config.stop_after_converged_s:.0f} s inside the radius.\n")
        else:
            f.write("III. Detections:\n")
            f.write(f"  Sources Located: {metrics.detection_count} of {len(metrics.sources)}"
                    f" (within {config.r_tt} m)\n")
            f.write(f"  Detection Events: {len(metrics.detection_log)}\n")
            f.write(f"  Explored Areas: {len(metrics.explored_areas)}\n")
            for i, area in enumerate(metrics.explored_areas):
                f.write(f"    Area {i}: center ({area.center[0]:.3f}, {area.center[1]:.3f}) m,"
                        f" radius {area.radius:.3f} m\n")
        f.write("\n" + "="*80 + "\nEnd of Report\n")
    return filepath


def save_run_outputs(metrics, config, output_dir):
    """Writes every per-run artifact and returns their paths by name."""
    paths = {
        'metrics_summary': save_metrics_summary(metrics, output_dir),
        'summary_report': save_summary_report(metrics, config, output_dir),
        'events': save_events(metrics, output_dir),
        'effective_config': save_effective_config(config, output_dir),
    }
    if config.emit_trajectories:
        paths['trajectory'] = save_trajectory(metrics, output_dir)
    if metrics.scenario == "single":
        paths['centroid_distance'] = save_centroid_distance(metrics, output_dir)
    else:
        paths['detections'] = save_detections(metrics, output_dir)
    return {name: path for name, path in paths.items() if path is not None}


def save_sweep_outputs(table, runs_df, output_dir):
    """Writes the per-run rows and the aggregated table of a preset sweep."""
    paths = {}
    if table == 1:
        paths['runs'] = _write_csv(runs_df, output_dir / "table1_runs.csv")
        summary = summarize_convergence_sweep(runs_df)
        paths['summary'] = _write_csv(summary, output_dir / "table1_grid.csv")
        grid = convergence_grid(summary)
        with atomic_write(output_dir / "table1_matrix.csv") as f:
            grid.to_csv(f, float_format='%.3f')
        paths['matrix'] = output_dir / "table1_matrix.csv"
    else:
        paths['runs'] = _write_csv(runs_df, output_dir / "table2_runs.csv")
        summary = summarize_detection_sweep(runs_df)
        paths['summary'] = _write_csv(summary, output_dir / "table2_summary.csv")
    return paths, summary
