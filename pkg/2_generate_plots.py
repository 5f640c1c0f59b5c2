# -*- coding: utf-8 -*-
"""
==============================================================================
# Source-Seeking Lab - Step 2: Figures
#
# Purpose:
# Renders PNG figures from a results directory written by step 1: formation
# trajectories and centroid distance for single-source runs, detection maps
# for multi-source runs, and the comparison charts for sweep directories.
==============================================================================
"""
import argparse
from pathlib import Path

# Since this script is in the root, we can directly import from 'src'
from src.visualization import generate_plots


def get_project_root():
    """Returns the absolute path to the project's root directory."""
    return Path(__file__).parent


def main_cli():
    """The main function to parse arguments and render the figures."""
    parser = argparse.ArgumentParser(description="Source-Seeking Lab figures")
    parser.add_argument('--results', type=Path, default=get_project_root() / 'results',
                        help='Run or sweep output directory to plot.')
    args = parser.parse_args()

    if not args.results.is_dir():
        print(f"ERROR: results directory not found at {args.results}")
        return 1

    print(f"\n{'='*20} Generating figures for: {args.results} {'='*20}")
    paths = generate_plots(args.results)
    if not paths:
        print("No plottable CSV outputs found. Run 1_run_experiment_cli.py first.")
        return 1
    for name, path in paths.items():
        print(f"  {name}: {path}")
    print("--- Figure generation completed successfully! ---")
    return 0


if __name__ == "__main__":
    raise SystemExit(main_cli())
