# -*- coding: utf-8 -*-
"""
Command-line harness for single runs and preset sweeps.

    run   --scenario single --seed 7 --out results/
    sweep --table 1 --runs 3 --out results/table1/

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime failure.
"""
import argparse
import logging
import sys
from pathlib import Path

from src.analysis_engine import sweep_trend
from src.config import apply_overrides, build_config, load_config
from src.errors import ConfigError, SourceSeekingError
from src.reporting import save_run_outputs, save_sweep_outputs
from src.sim_engine import run_scenario, sweep
from src.utils import get_project_root, get_run_label, setup_output_directory

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises on bad flags instead of exiting, so usage errors map to exit code 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(
        prog="source-seeking",
        description="Acoustic source-seeking simulator CLI",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument('--config', type=Path, help='YAML scenario file (flags override its values).')
    common.add_argument('--seed', type=int, help='Base seed of the run(s).')
    common.add_argument('--runs', type=int, help='Number of seeded runs.')
    common.add_argument('--duration', type=float, help='Simulated horizon in seconds.')
    common.add_argument('--out', type=Path, help='Output directory (default: results/).')
    common.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    run = subparsers.add_parser('run', parents=[common], help='Run one scenario.')
    run.add_argument('--scenario', choices=['single', 'multi'], help='Scenario kind.')
    run.add_argument('--emit-trajectories', choices=['on', 'off'], help='Write trajectory.csv.')
    run.add_argument('--targets', type=int, help='Number of randomly spawned sources (multi).')

    sweep_cmd = subparsers.add_parser('sweep', parents=[common], help='Run a preset sweep.')
    sweep_cmd.add_argument('--table', type=int, choices=[1, 2], required=True,
                           help='1: noise grid (single source)\n2: number of targets (multi source)')
    sweep_cmd.add_argument('--workers', type=int, default=1, help='Worker processes for independent runs.')
    return parser


def resolve_config(args, scenario=None):
    """Config file (if any) with the flag values laid over it, fully validated."""
    overrides = {
        'scenario': scenario,
        'seed': args.seed,
        'runs': args.runs,
        'duration_s': args.duration,
    }
    if getattr(args, 'emit_trajectories', None) is not None:
        overrides['emit_trajectories'] = args.emit_trajectories == 'on'
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if getattr(args, 'targets', None) is not None:
        # An explicit target count means a random spawn.
        overrides['target_count'] = args.targets
        overrides['source_positions'] = None
    if args.config is not None:
        return load_config(args.config, overrides)
    return build_config({'scenario': 'single', **overrides})


def command_run(args):
    config = resolve_config(args, args.scenario)
    root = args.out or get_project_root() / 'results'
    print(f"\n{'='*20} Starting {config.scenario}-source run (seed {config.seed}) {'='*20}")
    for run_index in range(config.runs):
        seed = config.seed + run_index
        label = get_run_label(config.scenario, seed, run_index) if config.runs > 1 else None
        output_dir = setup_output_directory(root, label)
        run_config = apply_overrides(config, seed=seed, runs=1)
        print(f"Output will be saved to: {output_dir}")
        metrics = run_scenario(run_config)
        save_run_outputs(metrics, run_config, output_dir)
        if metrics.scenario == 'single':
            outcome = (f"t_s = {metrics.convergence_time_s:.3f} s" if metrics.converged
                       else f"not converged (final distance {metrics.final_distance_m:.3f} m)")
        else:
            outcome = f"{metrics.detection_count} of {len(metrics.sources)} sources located"
        print(f"  Run {run_index} (seed {seed}): {outcome}")
    print(f"--- {config.scenario.capitalize()}-source run completed successfully! ---")
    return EXIT_OK


def command_sweep(args):
    scenario = 'single' if args.table == 1 else 'multi'
    if args.config is not None:
        declared = load_config(args.config).scenario
        if declared != scenario:
            raise ConfigError('scenario', f"table {args.table} sweeps the {scenario}-source scenario, "
                                          f"{args.config} declares {declared!r}")
    config = resolve_config(args, scenario)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    output_dir = setup_output_directory(args.out or get_project_root() / 'results' / f"table{args.table}")
    print(f"\n{'='*20} Starting Table {args.table} sweep ({config.runs} run(s) per cell) {'='*20}")
    print(f"Output will be saved to: {output_dir}")
    runs_df = sweep(config, args.table, config.runs, config.seed, workers=args.workers, duration_s=args.duration)
    _, summary = save_sweep_outputs(args.table, runs_df, output_dir)
    print(summary.to_string(index=False))
    trend = sweep_trend(summary, args.table)
    for row in trend.itertuples(index=False):
        print(f"  {row.series}: {row.violations} decrease(s) over {row.points} point(s)")
    print(f"--- Table {args.table} sweep completed successfully! ---")
    return EXIT_OK


def main(argv=None):
    """Parses `argv` and runs the command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=args.log_level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if args.command == 'run':
            return command_run(args)
        return command_sweep(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"Configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SourceSeekingError, OSError) as exc:
        logger.exception("run failed")
        print(f"Run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
