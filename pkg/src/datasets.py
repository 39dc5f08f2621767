#!/usr/bin/env python3
"""
Datasets - Packed grayscale image sets on disk, conversion from array exports,
and a synthetic stripes-vs-checkers generator

On-disk layout of a dataset directory:
    meta          text lines "key value": height, width, classes, train, val
    train.bin     row-major uint8 pixels, one image after another
    train.labels  one uint8 label per image
    val.bin / val.labels  same for the validation split
"""
import logging
import os
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from src.errors import ConfigError, DimensionMismatchError

logger = logging.getLogger(__name__)

SPLITS = ("train", "val")

# Pattern ids of the synthetic generator
STRIPES_HORIZONTAL = "stripes_h"
STRIPES_VERTICAL = "stripes_v"
CHECKERS = "checkers"
BLANK = "blank"


@dataclass
class Dataset:
    """Grayscale images in [-1, 1] with integer labels"""
    images: np.ndarray
    labels: np.ndarray
    split: str
    n_classes: int

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int).reshape(-1)
        if self.images.ndim != 3:
            raise DimensionMismatchError(f"Images must be shaped (N, H, W), got {self.images.shape}")
        if len(self.images) != len(self.labels):
            raise DimensionMismatchError(
                f"{len(self.images)} images but {len(self.labels)} labels in split '{self.split}'"
            )

    def __len__(self):
        return len(self.labels)

    @property
    def image_shape(self) -> Tuple[int, int]:
        return self.images.shape[1], self.images.shape[2]

    def subset(self, count: int) -> "Dataset":
        return Dataset(self.images[:count], self.labels[:count], self.split, self.n_classes)


def normalize_pixels(pixels) -> np.ndarray:
    """uint8 [0, 255] -> float [-1, 1]"""
    return np.asarray(pixels, dtype=float) / 255.0 * 2.0 - 1.0


def quantize_pixels(images) -> np.ndarray:
    """float [-1, 1] -> uint8 [0, 255]"""
    scaled = np.round((np.clip(images, -1.0, 1.0) + 1.0) / 2.0 * 255.0)
    return scaled.astype(np.uint8)


def read_meta(path: str) -> Dict[str, int]:
    """Parse the 'key value' meta file"""
    meta = {}
    with open(os.path.join(path, "meta"), "r") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigError(f"Malformed meta entry '{line}'", field="meta", line=line_number)
            try:
                meta[parts[0]] = int(parts[1])
            except ValueError:
                raise ConfigError(f"Meta value for '{parts[0]}' is not an integer",
                                  field=parts[0], line=line_number)
    for key in ("height", "width", "classes", *SPLITS):
        if key not in meta:
            raise ConfigError(f"Meta file lacks '{key}'", field=key)
    return meta


def load_dataset(path: str) -> Tuple[Dataset, Dataset]:
    """Load (train, validation) splits; pixels are normalized to [-1, 1] here"""
    meta = read_meta(path)
    height, width = meta["height"], meta["width"]
    splits = []
    for split in SPLITS:
        count = meta[split]
        pixels = np.fromfile(os.path.join(path, f"{split}.bin"), dtype=np.uint8)
        labels = np.fromfile(os.path.join(path, f"{split}.labels"), dtype=np.uint8)
        if pixels.size != count * height * width:
            raise DimensionMismatchError(
                f"{split}.bin holds {pixels.size} pixels, meta promises {count}x{height}x{width}"
            )
        if labels.size != count:
            raise DimensionMismatchError(f"{split}.labels holds {labels.size} labels, expected {count}")
        if labels.size and labels.max() >= meta["classes"]:
            raise ConfigError(f"{split}.labels contains label {labels.max()} "
                              f"but meta declares {meta['classes']} classes", field="classes")
        images = normalize_pixels(pixels.reshape(count, height, width))
        splits.append(Dataset(images, labels, split, meta["classes"]))
    logger.info("Loaded %s: %d train / %d val images of %dx%d",
                path, len(splits[0]), len(splits[1]), height, width)
    return splits[0], splits[1]


def save_dataset(path: str, train: Dataset, val: Dataset):
    """Write both splits in the packed on-disk layout"""
    if train.image_shape != val.image_shape:
        raise DimensionMismatchError("Train and validation images differ in shape")
    os.makedirs(path, exist_ok=True)
    height, width = train.image_shape
    n_classes = max(train.n_classes, val.n_classes)

    for split, data in zip(SPLITS, (train, val)):
        quantize_pixels(data.images).tofile(os.path.join(path, f"{split}.bin"))
        data.labels.astype(np.uint8).tofile(os.path.join(path, f"{split}.labels"))

    with open(os.path.join(path, "meta"), "w") as f:
        f.write(f"height {height}\n")
        f.write(f"width {width}\n")
        f.write(f"classes {n_classes}\n")
        f.write(f"train {len(train)}\n")
        f.write(f"val {len(val)}\n")


def convert_dataset(source: str, destination: str, n_classes: int = 0) -> Tuple[Dataset, Dataset]:
    """
    Convert a packed-array export (.npz) into the on-disk layout

    Args:
        source: .npz file with train_images, train_labels, val_images, val_labels
        destination: Output directory
        n_classes: Class count; inferred from the labels when 0
    """
    if not os.path.exists(source):
        raise ConfigError(f"Input file '{source}' not found", field="source")
    try:
        archive = np.load(source)
    except (OSError, ValueError) as e:
        raise ConfigError(f"Cannot read '{source}' as an .npz archive: {e}", field="source")
    if not hasattr(archive, "files"):
        raise ConfigError(f"'{source}' holds a single array, expected an .npz archive",
                          field="source")
    with archive:
        missing = [k for k in ("train_images", "train_labels", "val_images", "val_labels")
                   if k not in archive.files]
        if missing:
            raise ConfigError(f"Archive lacks arrays: {', '.join(missing)}", field="source")
        arrays = {k: archive[k] for k in archive.files}

    def to_grey(raw):
        raw = np.asarray(raw)
        if raw.ndim == 4:
            # Colour exports: average the channels down to grayscale
            raw = raw.mean(axis=-1)
        return raw

    splits = [to_grey(arrays["train_images"]), to_grey(arrays["val_images"])]
    if any(raw.dtype != np.uint8 for raw in splits):
        # One mapping shared by both splits
        values = np.concatenate([raw.ravel() for raw in splits]).astype(float)
        low, high = (float(values.min()), float(values.max())) if values.size else (0.0, 1.0)
        span = high - low if high > low else 1.0
        splits = [np.round((raw - low) / span * 255.0).astype(np.uint8) for raw in splits]
    train_pixels, val_pixels = (normalize_pixels(raw) for raw in splits)

    train_labels = np.asarray(arrays["train_labels"]).reshape(-1).astype(int)
    val_labels = np.asarray(arrays["val_labels"]).reshape(-1).astype(int)
    if not n_classes:
        n_classes = int(max(train_labels.max(), val_labels.max())) + 1

    train = Dataset(train_pixels, train_labels, "train", n_classes)
    val = Dataset(val_pixels, val_labels, "val", n_classes)
    save_dataset(destination, train, val)
    logger.info("Converted %s -> %s (%d classes)", source, destination, n_classes)
    return train, val


def _pattern(kind: str, size: int) -> np.ndarray:
    rows, cols = np.indices((size, size))
    if kind == STRIPES_HORIZONTAL:
        return np.where(rows % 2 == 0, 1.0, -1.0)
    if kind == STRIPES_VERTICAL:
        return np.where(cols % 2 == 0, 1.0, -1.0)
    if kind == CHECKERS:
        return np.where((rows + cols) % 2 == 0, 1.0, -1.0)
    if kind == BLANK:
        return np.zeros((size, size))
    raise ConfigError(f"Unknown synthetic pattern '{kind}'", field="pattern")


def make_synthetic_dataset(n_train: int = 200, n_val: int = 50, size: int = 8, n_classes: int = 2,
                           noise: float = 0.05, seed: int = 0) -> Tuple[Dataset, Dataset]:
    """
    Stripes-vs-checkers images

    Two classes: stripes (horizontal or vertical, label 0) and checkers (label 1).
    Four classes: horizontal stripes, vertical stripes, checkers, blank.
    Gaussian pixel noise is added and the result clipped to [-1, 1].
    """
    if n_classes == 2:
        classes = [[STRIPES_HORIZONTAL, STRIPES_VERTICAL], [CHECKERS]]
    elif n_classes == 4:
        classes = [[STRIPES_HORIZONTAL], [STRIPES_VERTICAL], [CHECKERS], [BLANK]]
    else:
        raise ConfigError(f"Synthetic data supports 2 or 4 classes, got {n_classes}",
                          field="n_classes")
    if size < 2:
        raise ConfigError("Synthetic images must be at least 2x2", field="size")

    rng = np.random.default_rng(seed)

    def build(count, split):
        # Balanced labels, shuffled
        labels = rng.permutation(np.arange(count) % n_classes)
        images = np.empty((count, size, size))
        for i, label in enumerate(labels):
            kind = classes[label][rng.integers(len(classes[label]))]
            images[i] = _pattern(kind, size) + rng.normal(0.0, noise, (size, size))
        return Dataset(np.clip(images, -1.0, 1.0), labels, split, n_classes)

    return build(n_train, "train"), build(n_val, "val")
