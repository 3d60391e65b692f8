"""
main.py

Command-line front end for relay precoding experiments:
1. table1 / table2: reproduce the worst-station throughput tables
2. sweep: throughput-vs-SNR curves from a preset, a config file or flags
3. single: every selected scheme on one sampled channel
4. verify: property suites over random instances

Exit codes: 0 on success, 1 on configuration errors, 2 on numerical or other
failures (including failed verification).

Usage:
    # Run as command-line tool (if package is installed)
    mimoswitch table1 --channels 2000 --out results/

    # Run as module
    python -m mimoswitch.cli.main sweep --preset fig-four-station

    # Run directly using the scripts
    python scripts/run_sweep.py --config experiments/n4.json
"""

import argparse
import dataclasses
import json
import os
import sys
import logging
from typing import Dict, List, Optional

from mimoswitch.cli.verify import run_verification
from mimoswitch.errors import ConfigError
from mimoswitch.simulation.config_loader import (
    OutputOptions,
    build_sim_config,
    default_output_dir,
    load_config,
    output_options,
)
from mimoswitch.simulation.gap_calculator import TABLE_LAYOUTS, build_table
from mimoswitch.simulation.output_generator import (
    generate_gnuplot_data,
    generate_provenance,
    generate_samples_output,
    generate_summary_output,
    generate_table_output,
)
from mimoswitch.simulation.presets import get_preset
from mimoswitch.simulation.sweep import SimConfig, SimResult, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def setup_logging(output_dir=None):
    """Set up logging with a file handler under <output_dir>/logs and a stream handler."""
    if output_dir is None:
        output_dir = default_output_dir()

    # Create logs directory
    logs_dir = os.path.join(output_dir, "logs")
    os.makedirs(logs_dir, exist_ok=True)

    log_file = os.path.join(logs_dir, "mimoswitch.log")

    # Modules configure a root handler on import, so replace it
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler()
        ],
        force=True,
    )

    return logging.getLogger(__name__)


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None,
                        help='JSON experiment file (sections: simulation, phase_search, sdr, ...)')
    common.add_argument('--seed', type=int, default=None, help='Master seed')
    common.add_argument('--channels', type=int, default=None, help='Channel realizations per SNR point')
    common.add_argument('--snr', type=str, default=None, help='Comma-separated SNR points in dB, e.g. 0,10,20,30')
    common.add_argument('--pattern', type=str, default=None, help='Switch pattern: pairwise or nonpairwise')
    common.add_argument('--schemes', type=str, default=None,
                        help='Comma-separated schemes; parameters after a colon, e.g. random_phase:trials=100')
    common.add_argument('--stations', type=int, default=None, help='Number of stations N')
    common.add_argument('--out', type=str, default=None,
                        help='Output directory (default: $MIMOSWITCH_OUTPUT_DIR or output)')
    common.add_argument('--format', type=str, default=None, help='Summary format: csv or json')
    common.add_argument('--threads', type=int, default=None, help='Worker processes (default: all cores)')
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-command per experiment type."""
    parser = argparse.ArgumentParser(prog='mimoswitch', description='MIMO switching relay precoding experiments')
    common = _common_arguments()
    commands = parser.add_subparsers(dest='command', required=True)

    for which, help_text in (('table1', 'Two-station worst-station throughput table'),
                             ('table2', 'Four-station worst-station throughput table')):
        table = commands.add_parser(which, parents=[common], help=help_text)
        table.add_argument('--layout', choices=TABLE_LAYOUTS, default='full',
                           help='full (with network-coded columns) or compact (zero-forcing columns only)')

    sweep = commands.add_parser('sweep', parents=[common], help='Throughput-vs-SNR curves')
    sweep.add_argument('--preset', type=str, default=None,
                       help='fig-two-station, fig-four-station, fig-non-pairwise, fig-maxmin-non-pairwise, table1, table2')

    commands.add_parser('single', parents=[common], help='Solve one sampled channel with every selected scheme')

    verify = commands.add_parser('verify', parents=[common], help='Run the property suites')
    verify.add_argument('--trials', type=int, default=12, help='Random instances per suite')
    return parser


def _split(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    items = [item.strip() for item in _split_schemes(text)]
    return [item for item in items if item]


def _split_schemes(text: str) -> List[str]:
    """Split on commas that start a new scheme, not on commas inside a parameter suffix."""
    items: List[str] = []
    for part in text.split(','):
        if items and ':' in items[-1] and '=' in part and ':' not in part:
            items[-1] += ',' + part
        else:
            items.append(part)
    return items


def _parse_snr(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise ConfigError(f"--snr must be a comma-separated list of numbers, got '{text}'") from e


def effective_config(args: argparse.Namespace, base: Optional[SimConfig] = None):
    """SimConfig and OutputOptions from a preset, a config file and flags, in that order."""
    raw = load_config(args.config) if args.config else {}
    overrides: Dict[str, object] = {
        'seed': args.seed,
        'channels': args.channels,
        'snr_db': _parse_snr(args.snr),
        'pattern': args.pattern,
        'schemes': _split(args.schemes),
        'n': args.stations,
        'threads': args.threads,
    }
    cfg = build_sim_config(raw, base, overrides)
    return cfg, output_options(raw, args.out, args.format)


def _write_sweep_outputs(result: SimResult, name: str, options: OutputOptions, extra: Dict) -> None:
    generate_summary_output(result, name, options.directory, options.format)
    generate_provenance(result, name, options.directory, extra)
    if options.gnuplot:
        generate_gnuplot_data(result, name, options.directory)


def cmd_table(args: argparse.Namespace, which: int, logger: logging.Logger) -> int:
    """Run a table preset and write its summary, table, provenance and plot data."""
    preset = get_preset(f'table{which}')
    cfg, options = effective_config(args, preset.config)
    if args.layout == 'compact':
        cfg = dataclasses.replace(cfg, schemes=tuple(s for s in cfg.schemes if not s.startswith('pnc_')))
    logger.info(f"Reproducing table {which}: {cfg.channels} channels per SNR point")

    result = run_sweep(cfg)
    table = build_table(result.summary, preset.table_reference, layout=args.layout)
    _write_sweep_outputs(result, preset.name, options, {'preset': preset.name})
    generate_table_output(table, preset.name, options.directory, options.format)

    print(table.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, logger: logging.Logger) -> int:
    """Run a preset or configured sweep and write long-format results."""
    preset = get_preset(args.preset) if args.preset else None
    cfg, options = effective_config(args, preset.config if preset else None)
    name = preset.name if preset else 'sweep'
    logger.info(f"Running sweep '{name}'")

    result = run_sweep(cfg)
    _write_sweep_outputs(result, name, options, {'preset': name if preset else None})
    print(result.summary.to_string(index=False))
    return EXIT_OK


def cmd_single(args: argparse.Namespace, logger: logging.Logger) -> int:
    """Every selected scheme on a single channel: ε, power and throughput per scheme."""
    cfg, options = effective_config(args)
    cfg = dataclasses.replace(cfg, channels=1, threads=1)
    logger.info(f"Solving one channel with N={cfg.n} (seed {cfg.seed})")

    result = run_sweep(cfg)
    generate_samples_output(result, 'single', options.directory)
    generate_provenance(result, 'single', options.directory)

    columns = ['scheme', 'snr_db', 'worst_eps', 'power', 'worst_tput', 'mean_tput', 'failed']
    print(result.samples[columns].to_string(index=False))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, logger: logging.Logger) -> int:
    """Run the property suites; print one line per suite."""
    results = run_verification(seed=args.seed or 0, trials=args.trials)
    for result in results:
        status = 'PASS' if result.passed else 'FAIL'
        print(f"{status} {result.name}: {result.checks - len(result.failures)}/{result.checks} checks")
        for failure in result.failures[:5]:
            print(f"    {failure}")

    failed = [result.name for result in results if not result.passed]
    if failed:
        print(f"Failed properties: {', '.join(failed)}")
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI application."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    logger = setup_logging(args.out or default_output_dir())
    logger.info(f"Starting mimoswitch {args.command}")

    try:
        if args.command in ('table1', 'table2'):
            code = cmd_table(args, int(args.command[-1]), logger)
        elif args.command == 'sweep':
            code = cmd_sweep(args, logger)
        elif args.command == 'single':
            code = cmd_single(args, logger)
        else:
            code = cmd_verify(args, logger)

        if code == EXIT_OK:
            logger.info(f"mimoswitch {args.command} completed successfully")
        return code

    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as e:
        logger.error(f"Configuration error: {str(e)}")
        print(f"Error: {str(e)}", file=sys.stderr)
        return EXIT_CONFIG

    except Exception as e:
        logger.error(f"Error in {args.command}: {str(e)}", exc_info=True)
        print(f"Error: {str(e)}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
