#!/usr/bin/env python3
"""
QCCNN Lab Command Line Interface - Unified CLI for experiments, datasets and reports
"""
import argparse
import configparser
import logging
import sys

from src.datasets import convert_dataset, make_synthetic_dataset, save_dataset
from src.encodings import CircuitSpec, EncodingKind
from src.errors import ConfigError, QccnnError
from src.fourier import dof_report, saturation_layer
from src.harness import SUMMARY_COLUMNS, aggregate, load_experiment_config, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def parse_args(argv=None):
    """Parse command line arguments for the unified CLI"""
    parser = argparse.ArgumentParser(
        description='QCCNN Lab - quantum encodings, hybrid convolution and circuit metrics',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Run an experiment described by a config file
  ./qccnn_cli.py run configs/train_sweep.ini
  ./qccnn_cli.py --jobs 4 --seed 1 --out-dir results/seed1 run configs/metrics.ini

  # Aggregate training CSVs across seeds
  ./qccnn_cli.py aggregate "results/seed*/train_sweep.csv" --output results/summary.csv

  # Prepare data
  ./qccnn_cli.py convert-dataset breastmnist.npz data/breast
  ./qccnn_cli.py synthetic data/synthetic --size 8

  # Parameter count vs Fourier degrees of freedom
  ./qccnn_cli.py dof --encoding higher_order --max-layers 5
"""
    )
    parser.add_argument('--seed', type=int, default=None,
                        help='Override the config seed list with a single seed')
    parser.add_argument('--out-dir', '-o', default=None,
                        help='Override the output directory of the experiment')
    parser.add_argument('--jobs', '-j', type=int, default=None,
                        help='Worker threads for independent tasks (default: from config, else 1)')
    parser.add_argument('--verbose', '-v', action='store_true',
                        help='Print progress and debug logging')

    subparsers = parser.add_subparsers(dest='command', help='Command')
    subparsers.required = True

    # RUN command - run one experiment config
    run_parser = subparsers.add_parser('run', help='Run an experiment config')
    run_parser.add_argument('config', help='Path to the experiment .ini file')

    # AGGREGATE command - mean/std across seeds
    aggregate_parser = subparsers.add_parser('aggregate', help='Aggregate training CSVs across seeds')
    aggregate_parser.add_argument('pattern', help='Glob of training CSV files (quote it)')
    aggregate_parser.add_argument('--output', default='summary.csv',
                                  help='Summary CSV path (default: summary.csv)')

    # CONVERT-DATASET command
    convert_parser = subparsers.add_parser('convert-dataset',
                                           help='Convert an .npz export into the on-disk dataset format')
    convert_parser.add_argument('source', help='Input .npz file')
    convert_parser.add_argument('destination', help='Output dataset directory')
    convert_parser.add_argument('--classes', type=int, default=0,
                                help='Class count (default: inferred from labels)')

    # SYNTHETIC command
    synthetic_parser = subparsers.add_parser('synthetic',
                                             help='Write the stripes-vs-checkers dataset to disk')
    synthetic_parser.add_argument('destination', help='Output dataset directory')
    synthetic_parser.add_argument('--train', type=int, default=200, help='Training images (default: 200)')
    synthetic_parser.add_argument('--val', type=int, default=50, help='Validation images (default: 50)')
    synthetic_parser.add_argument('--size', type=int, default=8, help='Image side length (default: 8)')
    synthetic_parser.add_argument('--classes', type=int, choices=[2, 4], default=2,
                                  help='2 (stripes vs checkers) or 4 classes (default: 2)')
    synthetic_parser.add_argument('--noise', type=float, default=0.05,
                                  help='Gaussian pixel noise (default: 0.05)')

    # DOF command
    dof_parser = subparsers.add_parser('dof', help='Print parameter count vs Fourier degrees of freedom')
    dof_parser.add_argument('--encoding', '-e', default=None,
                            help='Encoding (default: angle_x and higher_order)')
    dof_parser.add_argument('--qubits', type=int, default=4, help='Number of qubits (default: 4)')
    dof_parser.add_argument('--max-layers', type=int, default=5, help='Largest layer count (default: 5)')

    return parser.parse_args(argv)


def configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(levelname)s %(name)s: %(message)s',
    )


def run_experiment(args):
    """Run one experiment config"""
    config = load_experiment_config(args.config, seed=args.seed, out_dir=args.out_dir,
                                    jobs=args.jobs)
    try:
        run(config, verbose=args.verbose)
    except KeyboardInterrupt:
        print("\n\nExperiment interrupted! Partial results were flushed.")
        return EXIT_RUNTIME
    print(f"Results written to {config.out_dir}")
    return EXIT_OK


def aggregate_results(args):
    """Aggregate training CSVs"""
    summary = aggregate(args.pattern, out_path=args.output)
    print(f"\nAggregated {len(summary)} group(s) into {args.output}")
    print("-" * 60)
    for row in summary:
        flag = " (single sample)" if row["single_sample"] else ""
        print(f"  {row['encoding']:<13} L={row['layers']} f={row['scaling']:<6} "
              f"train {float(row['best_train_accuracy_mean']):.3f}"
              f"±{float(row['best_train_accuracy_std']):.3f}  "
              f"val {float(row['best_val_accuracy_mean']):.3f}"
              f"±{float(row['best_val_accuracy_std']):.3f}{flag}")
    if args.verbose:
        print(f"\nColumns: {', '.join(SUMMARY_COLUMNS)}")
    return EXIT_OK


def convert(args):
    """Convert an .npz export"""
    train_set, val_set = convert_dataset(args.source, args.destination, n_classes=args.classes)
    print(f"Wrote {len(train_set)} training and {len(val_set)} validation images "
          f"({train_set.n_classes} classes) to {args.destination}")
    return EXIT_OK


def write_synthetic(args):
    """Write the synthetic dataset"""
    seed = args.seed if args.seed is not None else 0
    train_set, val_set = make_synthetic_dataset(n_train=args.train, n_val=args.val, size=args.size,
                                                n_classes=args.classes, noise=args.noise, seed=seed)
    save_dataset(args.destination, train_set, val_set)
    print(f"Wrote synthetic dataset ({args.classes} classes, {args.size}x{args.size}) "
          f"to {args.destination}")
    return EXIT_OK


def print_dof(args):
    """Print DofReports for the requested encodings"""
    if args.encoding:
        encodings = [EncodingKind.parse(args.encoding)]
    else:
        encodings = [EncodingKind.ANGLE_X, EncodingKind.HIGHER_ORDER]

    for encoding in encodings:
        print(f"\n{encoding.value} on {args.qubits} qubits")
        print("-" * 60)
        print(f"  {'L':>2} {'params':>12} {'degree':>7} {'nu':>12}  saturated")
        for layers in range(1, args.max_layers + 1):
            report = dof_report(CircuitSpec(encoding, n_features=args.qubits, layers=layers))
            print(f"  {report.L:>2} {report.n_params:>12} {report.degree:>7} {report.nu:>12}  "
                  f"{'yes' if report.saturated else 'no'}")
        print(f"  Last saturated layer count: {saturation_layer(encoding, args.qubits)}")
    return EXIT_OK


COMMANDS = {
    'run': run_experiment,
    'aggregate': aggregate_results,
    'convert-dataset': convert,
    'synthetic': write_synthetic,
    'dof': print_dof,
}


def main(argv=None):
    """Main entry point for the unified CLI"""
    args = parse_args(argv)
    configure_logging(args.verbose)

    handler = COMMANDS.get(args.command)
    if handler is None:
        print(f"Unknown command: {args.command}")
        return EXIT_CONFIG

    try:
        return handler(args)
    except (ConfigError, configparser.Error) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (QccnnError, OSError, RuntimeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
