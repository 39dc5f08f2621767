#!/usr/bin/env python3
"""
Make Synthetic Dataset - Write stripes-vs-checkers images in the on-disk
dataset format and print a small preview
"""
import argparse
import os
import sys

# Add parent directory to path to allow imports when run directly
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if parent_dir not in sys.path:
    sys.path.append(parent_dir)

from src.datasets import load_dataset, make_synthetic_dataset, save_dataset


def parse_args():
    parser = argparse.ArgumentParser(description='Generate the synthetic stripes-vs-checkers dataset')
    parser.add_argument('destination', help='Output dataset directory')
    parser.add_argument('--train', type=int, default=200, help='Training images (default: 200)')
    parser.add_argument('--val', type=int, default=50, help='Validation images (default: 50)')
    parser.add_argument('--size', type=int, default=8, help='Image side length (default: 8)')
    parser.add_argument('--classes', type=int, choices=[2, 4], default=2, help='Class count (default: 2)')
    parser.add_argument('--noise', type=float, default=0.05, help='Pixel noise (default: 0.05)')
    parser.add_argument('--seed', type=int, default=0, help='Seed (default: 0)')
    return parser.parse_args()


def preview(image):
    """Coarse text rendering of one image"""
    for row in image:
        print("    " + "".join("#" if value > 0 else "." for value in row))


def main():
    args = parse_args()
    train_set, val_set = make_synthetic_dataset(args.train, args.val, args.size, args.classes,
                                                args.noise, args.seed)
    save_dataset(args.destination, train_set, val_set)

    # Read back to confirm the files are consistent
    loaded, _ = load_dataset(args.destination)
    print(f"\nWrote {len(train_set)} train / {len(val_set)} val images to {args.destination}")
    for label in range(args.classes):
        index = int((loaded.labels == label).argmax())
        print(f"\n  label {label}:")
        preview(loaded.images[index])
    return 0


if __name__ == "__main__":
    sys.exit(main())
