#!/usr/bin/env python3
"""
Spectrum Report - Sample the univariate Fourier spectrum of one circuit and
print which frequency ranks are populated
"""
import argparse
import os
import sys

# Add parent directory to path to allow imports when run directly
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if parent_dir not in sys.path:
    sys.path.append(parent_dir)

from src.encodings import CircuitSpec
from src.fourier import FourierConfig, grid_periodic_scaling, sample_spectrum
from src.harness import parse_scaling
from src.plots import plot_spectrum


def parse_args():
    parser = argparse.ArgumentParser(description='Sample and summarize a univariate Fourier spectrum')
    parser.add_argument('--encoding', '-e', default='angle_y',
                        help='angle_x, angle_y or higher_order (default: angle_y)')
    parser.add_argument('--layers', '-l', type=int, default=1, help='Reuploading layers (default: 1)')
    parser.add_argument('--scaling', '-f', default='grid',
                        help="Scaling factor such as pi/4, or 'grid' for the grid-periodic value")
    parser.add_argument('--draws', '-n', type=int, default=100, help='Weight draws (default: 100)')
    parser.add_argument('--seed', type=int, default=0, help='Seed (default: 0)')
    parser.add_argument('--csv', help='Write every coefficient to this CSV file')
    parser.add_argument('--svg', help='Draw the coefficient clouds to this SVG file')
    return parser.parse_args()


def main():
    args = parse_args()
    config = FourierConfig(n_weight_draws=args.draws, seed=args.seed)
    if args.scaling == 'grid':
        scaling = grid_periodic_scaling(config.grid_points)
    else:
        scaling = parse_scaling(args.scaling)

    spec = CircuitSpec(args.encoding, n_features=4, scaling=scaling, layers=args.layers)
    print(f"\nSampling {spec.label()} at f={scaling:.6f} ({args.draws} weight draws)")
    spectrum = sample_spectrum(spec, config=config)

    print("-" * 60)
    for qubit, ranks in enumerate(spectrum.nonnull_ranks()):
        print(f"  qubit {qubit}: {ranks} non-null rank(s) of {config.n_coeffs}")
    print(f"  max |Im c|: {spectrum.max_abs_imag():.3e}")

    if args.csv:
        spectrum.write_csv(args.csv)
        print(f"  coefficients written to {args.csv}")
    if args.svg and plot_spectrum(spectrum, args.svg):
        print(f"  plot written to {args.svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
