# -*- coding: utf-8 -*-
"""
This is the post-processing engine of the simulator. It turns the raw
records of a run into the convergence time, and aggregates per-run sweep
rows into the two published table layouts with the published values
alongside for comparison.
"""
import pandas as pd
import numpy as np

# Published convergence times (s), indexed by sigma_d^2 then k_theta.
PUBLISHED_CONVERGENCE_TIMES = {
    0.01: {100.0: 251.662, 10.0: 259.034, 1.0: 382.876},
    0.1: {100.0: 258.768, 10.0: 259.077, 1.0: 382.870},
    1.0: {100.0: 340.709, 10.0: 340.724, 1.0: 382.850},
    10.0: {100.0: 1050.764, 10.0: 1050.770, 1.0: 1050.794},
    100.0: {100.0: 9250.778, 10.0: 9250.773, 1.0: 9250.756},
}

# Published mean number of located sources, indexed by number of targets.
PUBLISHED_DETECTIONS = {3: 2.7, 4: 3.6, 5: 4.4, 6: 4.5, 7: 5.4, 8: 6.4}


def convergence_time(listening_intervals, last_far_step, dt):
    """
    Earliest time after which the unit is listening and the centroid never
    leaves the convergence radius again, or None.

    `listening_intervals` are half-open [start, end) step ranges in time
    order; `last_far_step` is the last recorded step with the centroid
    outside the radius (-1 if never).
    """
    first_near = last_far_step + 1
    for start, end in listening_intervals:
        if end > first_near:
            return max(start, first_near) * dt
    return None


def summarize_convergence_sweep(runs_df):
    """Mean t_s per (sigma_d^2, k_theta) cell, laid out as the published grid."""
    if runs_df.empty:
        return pd.DataFrame()

    df = runs_df.copy()
    df['t_s'] = pd.to_numeric(df['t_s'], errors='coerce')
    grouped = df.groupby(['sigma_d2', 'k_theta'])
    summary = grouped.agg(
        runs=('run', 'size'),
        converged_runs=('converged', 'sum'),
        mean_t_s=('t_s', 'mean'),
        std_t_s=('t_s', 'std'),
        mean_listening_time_s=('listening_time_s', 'mean'),
        mean_phase_count=('phase_count', 'mean'),
    ).reset_index()
    summary['converged_runs'] = summary['converged_runs'].astype(int)
    summary['published_t_s'] = [
        PUBLISHED_CONVERGENCE_TIMES.get(s, {}).get(k, np.nan)
        for s, k in zip(summary['sigma_d2'], summary['k_theta'])
    ]
    summary['relative_error'] = (summary['mean_t_s'] - summary['published_t_s']) / summary['published_t_s']
    return summary.sort_values(['sigma_d2', 'k_theta'], ascending=[True, False], ignore_index=True)


def convergence_grid(summary):
    """sigma_d^2 rows x k_theta columns of mean t_s, k_theta descending as published."""
    if summary.empty:
        return pd.DataFrame()
    grid = summary.pivot(index='sigma_d2', columns='k_theta', values='mean_t_s')
    return grid.reindex(columns=sorted(grid.columns, reverse=True))


def summarize_detection_sweep(runs_df):
    """Mean and spread of located sources per target count, beside the published means."""
    if runs_df.empty:
        return pd.DataFrame()

    summary = runs_df.groupby('targets').agg(
        runs=('run', 'size'),
        mean_detections=('detections', 'mean'),
        std_detections=('detections', 'std'),
        min_detections=('detections', 'min'),
        max_detections=('detections', 'max'),
    ).reset_index()
    summary['published_mean_detections'] = summary['targets'].map(PUBLISHED_DETECTIONS)
    summary['detection_rate'] = summary['mean_detections'] / summary['targets']
    return summary.sort_values('targets', ignore_index=True)


def monotonicity_violations(values):
    """Number of strict decreases along a sequence (NaNs skipped)."""
    series = pd.Series(values, dtype=float).dropna()
    return int((series.diff() < 0).sum())


def sweep_trend(summary, table):
    """
    Strict decreases in each sweep series: mean t_s along sigma_d^2 per
    k_theta for table 1, mean detections along the target count for table 2.
    """
    if summary.empty:
        return pd.DataFrame(columns=['series', 'points', 'violations'])
    if table == 1:
        rows = []
        for k_theta in sorted(summary['k_theta'].unique(), reverse=True):
            column = summary[summary['k_theta'] == k_theta].sort_values('sigma_d2')
            rows.append({'series': f"k_theta={k_theta:g}", 'points': len(column),
                         'violations': monotonicity_violations(column['mean_t_s'])})
        return pd.DataFrame(rows)
    ordered = summary.sort_values('targets')
    return pd.DataFrame([{'series': 'mean_detections', 'points': len(ordered),
                          'violations': monotonicity_violations(ordered['mean_detections'])}])
