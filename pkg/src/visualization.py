# -*- coding: utf-8 -*-
"""
This module handles the creation and saving of all plots for a results
directory. It reads only the CSV outputs written by `src.reporting`, so any
run or sweep directory can be re-plotted after the fact.
"""
from pathlib import Path

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
from matplotlib.patches import Circle
import seaborn as sns
import pandas as pd

# Define a consistent color palette for all plots
plt.style.use('seaborn-v0_8-whitegrid')
PALETTE = {
    'listening': '#1f77b4',   # Blue
    'moving': '#ff7f0e',      # Orange
    'settling': '#adb5bd',    # Cool Grey
    'source': '#d62728',      # Brick Red
    'detection': '#2ca02c',   # Forest Green
    'ours': '#1f77b4',
    'published': '#adb5bd',
}
AGENT_COLORS = sns.color_palette('deep', 8)


def generate_plots(results_dir):
    """Main function to generate and save every plot the directory has data for."""
    results_dir = Path(results_dir)
    paths = {}
    trajectory = _read(results_dir / "trajectory.csv")
    centroid = _read(results_dir / "centroid_distance.csv")
    detections = _read(results_dir / "detections.csv")
    events = _read(results_dir / "events.csv")

    if trajectory is not None and centroid is not None:
        paths['formation_trajectories'] = plot_formation_trajectories(trajectory, events, results_dir)
    if centroid is not None:
        paths['centroid_distance'] = plot_centroid_distance(centroid, results_dir)
    if detections is not None:
        paths['detection_map'] = plot_detection_map(detections, trajectory, results_dir)

    table1 = _read(results_dir / "table1_grid.csv")
    if table1 is not None and not table1.empty:
        paths['convergence_heatmap'] = plot_convergence_heatmap(table1, results_dir)
    table2 = _read(results_dir / "table2_summary.csv")
    if table2 is not None and not table2.empty:
        paths['detection_bars'] = plot_detection_bars(table2, results_dir)
    return paths


def _read(filepath):
    return pd.read_csv(filepath) if filepath.is_file() else None


def _save(fig, filepath):
    fig.tight_layout()
    fig.savefig(filepath, bbox_inches='tight')
    plt.close(fig)
    return filepath


def plot_formation_trajectories(trajectory, events, output_dir):
    """Agent paths of the formation, with the formation shape at every listening start."""
    fig, ax = plt.subplots(figsize=(10, 10))
    for i, (agent_id, path) in enumerate(trajectory.groupby('agent_id')):
        ax.plot(path['x_m'], path['y_m'], color=AGENT_COLORS[i % len(AGENT_COLORS)], linewidth=1.5,
                label=f'Agent {agent_id}')
        ax.plot(path['x_m'].iloc[0], path['y_m'].iloc[0], 'o', color=AGENT_COLORS[i % len(AGENT_COLORS)])
    if events is not None:
        stops = events[events['event'] == 'listen_start']
        ax.scatter(stops['x_m'], stops['y_m'], marker='x', color=PALETTE['listening'], s=40,
                   label='Listening start (centroid)', zorder=3)
    ax.set_title('Formation Trajectories', fontsize=16, weight='bold')
    ax.set_xlabel('x (m)', fontsize=12)
    ax.set_ylabel('y (m)', fontsize=12)
    ax.set_aspect('equal', adjustable='datalim')
    ax.legend(loc='upper left', fontsize=11)
    return _save(fig, output_dir / "FormationTrajectories.png")


def plot_centroid_distance(centroid, output_dir):
    """Centroid-to-source distance over time with listening intervals shaded."""
    fig, ax = plt.subplots(figsize=(15, 8))
    ax.plot(centroid['time_s'], centroid['distance_m'], color=PALETTE['moving'], linewidth=2)

    # Shade contiguous runs of listening samples.
    listening = centroid['mode'] == 'listening'
    runs = (listening != listening.shift()).cumsum()
    for _, block in centroid[listening].groupby(runs[listening]):
        ax.axvspan(block['time_s'].iloc[0], block['time_s'].iloc[-1], color=PALETTE['listening'], alpha=0.15)

    ax.set_title('Distance of the Formation Centroid to the Source', fontsize=16, weight='bold')
    ax.set_xlabel('Time (s)', fontsize=12)
    ax.set_ylabel('Distance (m)', fontsize=12)
    ax.grid(True, which='both', linestyle='--', linewidth=0.5)
    return _save(fig, output_dir / "CentroidDistance.png")


def plot_detection_map(detections, trajectory, output_dir):
    """True sources, detection points and explored areas, over the agent paths if present."""
    fig, ax = plt.subplots(figsize=(10, 10))
    if trajectory is not None:
        for i, (agent_id, path) in enumerate(trajectory.groupby('agent_id')):
            ax.plot(path['x_m'], path['y_m'], color=AGENT_COLORS[i % len(AGENT_COLORS)], linewidth=0.8,
                    alpha=0.6, label=f'Agent {agent_id}')

    for _, area in detections[detections['kind'] == 'explored_area'].iterrows():
        ax.add_patch(Circle((area['x_m'], area['y_m']), area['radius_m'], fill=True, alpha=0.12,
                            color=PALETTE['detection']))
    sources = detections[detections['kind'] == 'source']
    found = detections[detections['kind'] == 'detection']
    ax.scatter(sources['x_m'], sources['y_m'], marker='*', s=250, color=PALETTE['source'], label='Sources', zorder=4)
    ax.scatter(found['x_m'], found['y_m'], marker='o', s=40, color=PALETTE['detection'], label='Detections', zorder=5)
    ax.set_title('Detection Map', fontsize=16, weight='bold')
    ax.set_xlabel('x (m)', fontsize=12)
    ax.set_ylabel('y (m)', fontsize=12)
    ax.set_aspect('equal', adjustable='datalim')
    ax.legend(loc='upper left', fontsize=10)
    return _save(fig, output_dir / "DetectionMap.png")


def plot_convergence_heatmap(summary, output_dir):
    """Mean convergence time per noise cell, ours beside the published grid."""
    ours = summary.pivot(index='sigma_d2', columns='k_theta', values='mean_t_s')
    published = summary.pivot(index='sigma_d2', columns='k_theta', values='published_t_s')
    columns = sorted(ours.columns, reverse=True)
    fig, axes = plt.subplots(1, 2, figsize=(16, 7))
    for ax, grid, title in ((axes[0], ours, 'This Simulator'), (axes[1], published, 'Published')):
        sns.heatmap(grid.reindex(columns=columns), annot=True, fmt='.1f', cmap='viridis', ax=ax,
                    cbar_kws={'label': 't_s (s)'})
        ax.set_title(title, fontsize=14, weight='bold')
        ax.set_xlabel('k_theta', fontsize=12)
        ax.set_ylabel('sigma_d^2', fontsize=12)
    fig.suptitle('Time of Convergence by Measurement Noise', fontsize=16, weight='bold')
    return _save(fig, output_dir / "ConvergenceHeatmap.png")


def plot_detection_bars(summary, output_dir):
    """Mean located sources per target count, ours vs published."""
    df_plot = summary.melt(id_vars='targets', value_vars=['mean_detections', 'published_mean_detections'],
                           var_name='series', value_name='detections')
    df_plot['series'] = df_plot['series'].map({'mean_detections': 'ours',
                                               'published_mean_detections': 'published'})
    fig, ax = plt.subplots(figsize=(14, 8))
    sns.barplot(data=df_plot, x='targets', y='detections', hue='series', palette=PALETTE, ax=ax)
    ax.set_title('Average Number of Located Sources', fontsize=16, weight='bold')
    ax.set_xlabel('Number of Targets', fontsize=12)
    ax.set_ylabel('Located Sources', fontsize=12)
    ax.grid(axis='y', linestyle='--', alpha=0.7)
    for container in ax.containers:
        ax.bar_label(container, fmt='%.1f', label_type='edge', fontsize=9, padding=3)
    return _save(fig, output_dir / "DetectionBars.png")
