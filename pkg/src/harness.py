#!/usr/bin/env python3
"""
Harness - Declarative experiment runs: training sweeps over encodings, layers
and scaling factors, circuit metrics, Fourier sampling, and seed aggregation

Every CSV starts with '#' header lines (version stamp, experiment kind,
resolved config) and is written to a temporary sibling first, then moved
into place.
"""
import configparser
import csv
import glob
import json
import logging
import math
import os
import re
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src import __version__
from src.datasets import Dataset, load_dataset, make_synthetic_dataset
from src.encodings import DEFAULT_SCALING, CircuitSpec, EncodingKind
from src.errors import ConfigError, QccnnError, SchemaMismatchError
from src.fourier import FourierConfig, dof_report, grid_periodic_scaling, sample_spectrum
from src.metrics import MetricsConfig, circuit_metrics
from src.plots import (
    plot_accuracy_vs_layers, plot_accuracy_vs_scaling, plot_metric_vs_accuracy, plot_spectrum,
)
from src.pool import TaskPool
from src.qccnn import TrainConfig, init_model, train

logger = logging.getLogger(__name__)

KINDS = ("train_sweep", "scaling_sweep", "metrics", "fourier")
TRAIN_KINDS = ("train_sweep", "scaling_sweep")

MIN_LAYERS = 1
MAX_LAYERS = 5

SYNTHETIC_DATASET = "synthetic"
GRID_SCALING = "grid"

# Scaling factors visited by scaling_sweep when none are configured
DEFAULT_SWEEP_SCALINGS = ("pi/4", "pi/2", "pi", "2pi", "4pi")

TRAIN_COLUMNS = ["encoding", "layers", "scaling", "seed", "best_train_accuracy",
                 "best_val_accuracy", "best_epoch", "final_train_loss", "final_val_loss",
                 "log_digest"]
SUMMARY_COLUMNS = ["encoding", "layers", "scaling", "scaling_value", "n_samples",
                   "best_train_accuracy_mean", "best_train_accuracy_std",
                   "best_val_accuracy_mean", "best_val_accuracy_std", "single_sample"]
TRAIN_METRICS = ("best_train_accuracy", "best_val_accuracy")
CIRCUIT_METRICS = ("expressibility", "entanglement", "normalized_effective_dimension")
METRIC_COLUMNS = ["encoding", "layers", "scaling", "seed", "n_qubits", *CIRCUIT_METRICS,
                  "config_hash"]
METRIC_SUMMARY_COLUMNS = (["encoding", "layers", "scaling", "scaling_value", "n_samples"]
                          + [f"{m}_{s}" for m in CIRCUIT_METRICS for s in ("mean", "std")]
                          + ["single_sample"])
FOURIER_COLUMNS = ["encoding", "layers", "scaling", "seed", "n_weight_draws", "nonnull_ranks",
                   "max_nonnull_ranks", "max_abs_imag"]
FOURIER_STATS_COLUMNS = ["encoding", "layers", "seed", "qubit", "rank", "mean_re", "mean_im",
                         "cov_re_re", "cov_re_im", "cov_im_im", "nonnull_fraction"]
DOF_COLUMNS = ["encoding", "d", "M", "L", "n_params", "degree", "nu", "saturated"]

_PI_PATTERN = re.compile(
    r"^(?P<coef>\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?$"
)


# --- Parsing helpers ----------------------------------------------------------

def parse_scaling(text: str) -> float:
    """'pi/4', '2pi', '4*pi', '3pi/4' or a plain float -> radians"""
    raw = str(text).strip().lower()
    match = _PI_PATTERN.match(raw)
    if match:
        coef = float(match.group("coef")) if match.group("coef") else 1.0
        den = float(match.group("den")) if match.group("den") else 1.0
        if den == 0:
            raise ConfigError(f"Scaling '{text}' divides by zero", field="scaling")
        value = coef * math.pi / den
    else:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"Cannot parse scaling '{text}'", field="scaling")
    if not value > 0 or not math.isfinite(value):
        raise ConfigError(f"Scaling must be a positive finite number, got '{text}'", field="scaling")
    return value


def format_scaling(value: float) -> str:
    """Symbolic key for a scaling: small rational multiples of pi print as 'pi/4', '2pi'"""
    ratio = Fraction(value / math.pi).limit_denominator(64)
    if ratio and abs(float(ratio) * math.pi - value) < 1e-12:
        num, den = ratio.numerator, ratio.denominator
        head = "pi" if num == 1 else f"{num}pi"
        return head if den == 1 else f"{head}/{den}"
    return repr(float(value))


def parse_layers(text: str) -> Tuple[int, ...]:
    """'1-5', '1,3' or combinations like '1-2,4'"""
    layers = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                low, high = (int(p) for p in part.split("-", 1))
                if high < low:
                    raise ConfigError(f"Empty layer range '{part}'", field="layers")
                layers.extend(range(low, high + 1))
            else:
                layers.append(int(part))
        except ValueError:
            raise ConfigError(f"Cannot parse layers '{text}'", field="layers")
    if not layers:
        raise ConfigError("Layer list is empty", field="layers")
    return tuple(sorted(set(layers)))


def _split_list(text: str) -> List[str]:
    return [item.strip() for item in str(text).split(",") if item.strip()]


# --- Experiment configuration -------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: kind, sweep grid, data and sub-configs"""
    kind: str
    encodings: Tuple[EncodingKind, ...] = tuple(EncodingKind)
    layers: Tuple[int, ...] = (1, 2, 3, 4, 5)
    scalings: Tuple[float, ...] = (DEFAULT_SCALING,)
    dataset: Optional[str] = None
    out_dir: str = "results"
    seeds: Tuple[int, ...] = (0, 1, 2)
    train_limit: int = 0
    val_limit: int = 0
    jobs: int = 1
    plots: bool = True
    train: TrainConfig = field(default_factory=TrainConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    fourier: FourierConfig = field(default_factory=FourierConfig)
    fourier_scaling: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"Unknown experiment kind '{self.kind}' "
                              f"(expected one of {', '.join(KINDS)})", field="kind")
        encodings = tuple(EncodingKind.parse(e) if isinstance(e, str) else e
                          for e in self.encodings)
        object.__setattr__(self, "encodings", encodings)
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "scalings", tuple(float(s) for s in self.scalings))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

        if not self.encodings:
            raise ConfigError("At least one encoding is required", field="encodings")
        bad = [l for l in self.layers if not MIN_LAYERS <= l <= MAX_LAYERS]
        if not self.layers or bad:
            raise ConfigError(f"layers must lie within {MIN_LAYERS}..{MAX_LAYERS}, got {bad or '[]'}",
                              field="layers")
        if not self.scalings or any(not s > 0 for s in self.scalings):
            raise ConfigError("scalings must be a non-empty list of positive values",
                              field="scalings")
        if not self.seeds or any(s < 0 for s in self.seeds):
            raise ConfigError("seeds must be a non-empty list of non-negative integers",
                              field="seeds")
        if self.kind in TRAIN_KINDS and not self.dataset:
            raise ConfigError(f"A dataset is required for '{self.kind}'", field="dataset")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}", field="jobs")
        if self.train_limit < 0 or self.val_limit < 0:
            raise ConfigError("Subset limits must be >= 0", field="train_limit")

    @property
    def sweep_scalings(self) -> Tuple[float, ...]:
        """Scalings visited by the training grid"""
        if self.kind == "scaling_sweep":
            return self.scalings
        return (self.train.scaling,)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "encodings": [e.value for e in self.encodings],
            "layers": list(self.layers),
            "scalings": [format_scaling(s) for s in self.scalings],
            "dataset": self.dataset,
            "seeds": list(self.seeds),
            "train_limit": self.train_limit,
            "val_limit": self.val_limit,
            "train": {k: (list(v) if isinstance(v, tuple) else v)
                      for k, v in asdict(self.train).items()},
            "metrics": asdict(self.metrics),
            "fourier": asdict(self.fourier),
            "fourier_scaling": self.fourier_scaling,
        }

    def header(self) -> List[str]:
        return [
            f"qccnn-lab {__version__}",
            f"kind: {self.kind}",
            f"config: {json.dumps(self.to_dict(), sort_keys=True)}",
        ]


def _line_of(text: str, section: str, key: str) -> Optional[int]:
    """Line number of `key` inside `[section]` of an INI text"""
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
        elif current == section and "=" in stripped:
            if stripped.split("=", 1)[0].strip().lower() == key.lower():
                return number
    return None


_SECTION_FIELDS = {
    "experiment": {"kind", "encodings", "layers", "scalings", "dataset", "out_dir", "seeds",
                   "train_limit", "val_limit", "jobs", "plots"},
    "train": {"epochs", "learning_rate", "batch_size", "optimizer", "scaling", "momentum",
              "stride"},
    "metrics": {"n_fidelity_pairs", "n_bins", "n_entanglement_samples", "n_theta_samples",
                "n_data_samples", "gamma", "n_effective"},
    "fourier": {"n_weight_draws", "grid_points", "n_coeffs", "scaling"},
}


def parse_experiment_config(text: str, seed: Optional[int] = None, out_dir: Optional[str] = None,
                            jobs: Optional[int] = None) -> ExperimentConfig:
    """
    Build an ExperimentConfig from INI text

    Args:
        text: Config file content with [experiment], [train], [metrics], [fourier] sections
        seed: Overrides the seed list with a single seed
        out_dir: Overrides the output directory
        jobs: Overrides the worker count

    Raises:
        ConfigError: Naming the offending section/field and line
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("Config must start with a [section] header", line=e.lineno)
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError(f"Unparsable config line: {e.errors[0][1] if e.errors else ''}".strip(),
                          line=line)
    except configparser.Error as e:
        raise ConfigError(f"Invalid config: {e}", line=getattr(e, "lineno", None))

    if not parser.has_section("experiment"):
        raise ConfigError("Config lacks an [experiment] section", field="experiment")
    for section in parser.sections():
        if section not in _SECTION_FIELDS:
            raise ConfigError(f"Unknown section [{section}]", field=section)
        for key in parser[section]:
            if key not in _SECTION_FIELDS[section]:
                raise ConfigError(f"Unknown key in [{section}]", field=f"{section}.{key}",
                                  line=_line_of(text, section, key))

    def get(section, key, convert, default):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key)
        try:
            return convert(raw)
        except ConfigError as e:
            raise ConfigError(e.detail, field=f"{section}.{key}",
                              line=_line_of(text, section, key))
        except ValueError:
            raise ConfigError(f"Invalid value '{raw}'", field=f"{section}.{key}",
                              line=_line_of(text, section, key))

    def parse_bool(raw):
        lowered = raw.strip().lower()
        if lowered in ("1", "yes", "true", "on"):
            return True
        if lowered in ("0", "no", "false", "off"):
            return False
        raise ValueError(raw)

    def build(cls, section, **values):
        try:
            return cls(**{k: v for k, v in values.items() if v is not None})
        except ConfigError as e:
            key = e.field
            raise ConfigError(e.detail, field=f"{section}.{key}",
                              line=_line_of(text, section, key) if key else None)

    seeds = get("experiment", "seeds", lambda r: tuple(int(s) for s in _split_list(r)), (0, 1, 2))
    if seed is not None:
        seeds = (seed,)

    train_config = build(
        TrainConfig, "train",
        epochs=get("train", "epochs", int, None),
        learning_rate=get("train", "learning_rate", float, None),
        batch_size=get("train", "batch_size", int, None),
        optimizer=get("train", "optimizer", str.strip, None),
        scaling=get("train", "scaling", parse_scaling, None),
        momentum=get("train", "momentum", float, None),
        stride=get("train", "stride", int, None),
        seeds=seeds,
    )
    metrics_config = build(
        MetricsConfig, "metrics",
        n_fidelity_pairs=get("metrics", "n_fidelity_pairs", int, None),
        n_bins=get("metrics", "n_bins", int, None),
        n_entanglement_samples=get("metrics", "n_entanglement_samples", int, None),
        n_theta_samples=get("metrics", "n_theta_samples", int, None),
        n_data_samples=get("metrics", "n_data_samples", int, None),
        gamma=get("metrics", "gamma", float, None),
        n_effective=get("metrics", "n_effective", int, None),
        seed=seeds[0],
    )
    fourier_config = build(
        FourierConfig, "fourier",
        n_weight_draws=get("fourier", "n_weight_draws", int, None),
        grid_points=get("fourier", "grid_points", int, None),
        n_coeffs=get("fourier", "n_coeffs", int, None),
        seed=seeds[0],
    )
    fourier_scaling = get("fourier", "scaling",
                          lambda r: None if r.strip().lower() == GRID_SCALING else parse_scaling(r),
                          None)

    kind = get("experiment", "kind", str.strip, None)
    if kind is None:
        raise ConfigError("Missing experiment kind", field="experiment.kind")
    default_scalings = DEFAULT_SWEEP_SCALINGS if kind == "scaling_sweep" else ("pi/4",)
    return build(
        ExperimentConfig, "experiment",
        kind=kind,
        encodings=get("experiment", "encodings",
                      lambda r: tuple(EncodingKind.parse(e) for e in _split_list(r)), None),
        layers=get("experiment", "layers", parse_layers, None),
        scalings=get("experiment", "scalings",
                     lambda r: tuple(parse_scaling(s) for s in _split_list(r)),
                     tuple(parse_scaling(s) for s in default_scalings)),
        dataset=get("experiment", "dataset", str.strip, None),
        out_dir=out_dir or get("experiment", "out_dir", str.strip, None),
        seeds=seeds,
        train_limit=get("experiment", "train_limit", int, None),
        val_limit=get("experiment", "val_limit", int, None),
        jobs=jobs or get("experiment", "jobs", int, None),
        plots=get("experiment", "plots", parse_bool, None),
        train=train_config,
        metrics=metrics_config,
        fourier=fourier_config,
        fourier_scaling=fourier_scaling,
    )


def load_experiment_config(path: str, **overrides) -> ExperimentConfig:
    if not os.path.exists(path):
        raise ConfigError(f"Config file '{path}' not found")
    with open(path, "r") as f:
        return parse_experiment_config(f.read(), **overrides)


# --- CSV output ---------------------------------------------------------------

def write_csv(path: str, columns: Sequence[str], rows: Sequence[Dict],
              header: Sequence[str] = ()):
    """Write rows to a temporary sibling, then move it over `path`"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as f:
        for line in header:
            f.write(f"# {line}\n")
        writer = csv.DictWriter(f, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    os.replace(tmp, path)


def read_csv(path: str) -> Tuple[List[str], List[Dict]]:
    """(columns, rows) of a CSV, skipping '#' header lines"""
    with open(path, "r", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    reader = csv.DictReader(lines)
    rows = list(reader)
    return list(reader.fieldnames or []), rows


# --- Aggregation --------------------------------------------------------------

def aggregate_rows(rows: Sequence[Dict], metrics: Sequence[str] = TRAIN_METRICS) -> List[Dict]:
    """Mean and sample std of `metrics` per (encoding, layers, scaling)"""
    groups = defaultdict(list)
    for row in rows:
        groups[(row["encoding"], int(row["layers"]), str(row["scaling"]))].append(row)

    summary = []
    for (encoding, layers, scaling), members in sorted(
            groups.items(), key=lambda item: (item[0][0], item[0][1], parse_scaling(item[0][2]))):
        out = {
            "encoding": encoding,
            "layers": layers,
            "scaling": scaling,
            "scaling_value": repr(parse_scaling(scaling)),
            "n_samples": len(members),
            "single_sample": int(len(members) == 1),
        }
        for metric in metrics:
            values = np.array([float(m[metric]) for m in members])
            out[f"{metric}_mean"] = repr(float(values.mean()))
            out[f"{metric}_std"] = repr(float(values.std(ddof=1)) if len(values) > 1 else 0.0)
        summary.append(out)
    return summary


def aggregate(paths: Sequence[str], out_path: Optional[str] = None) -> List[Dict]:
    """
    Aggregate training CSVs across seeds

    Raises:
        SchemaMismatchError: The inputs do not share one column layout
    """
    if isinstance(paths, str):
        paths = sorted(glob.glob(paths))
    if not paths:
        raise ConfigError("No CSV files to aggregate", field="paths")

    schema = None
    rows = []
    for path in paths:
        columns, file_rows = read_csv(path)
        if schema is None:
            schema = columns
            missing = [c for c in ("encoding", "layers", "scaling", "best_train_accuracy",
                                   "best_val_accuracy") if c not in columns]
            if missing:
                raise SchemaMismatchError(f"{path} lacks columns: {', '.join(missing)}")
        elif columns != schema:
            raise SchemaMismatchError(f"{path} has columns {columns}, expected {schema}")
        rows.extend(file_rows)

    summary = aggregate_rows(rows)
    if out_path:
        write_csv(out_path, SUMMARY_COLUMNS, summary,
                  [f"qccnn-lab {__version__}", "kind: aggregate",
                   f"inputs: {json.dumps(list(paths))}"])
    return summary


# --- Experiment runners -------------------------------------------------------

def _load_data(config: ExperimentConfig) -> Tuple[Dataset, Dataset]:
    if config.dataset == SYNTHETIC_DATASET:
        train_set, val_set = make_synthetic_dataset(seed=0)
    else:
        if not os.path.isdir(config.dataset):
            raise ConfigError(f"Dataset directory '{config.dataset}' not found",
                              field="experiment.dataset")
        train_set, val_set = load_dataset(config.dataset)
    if config.train_limit:
        train_set = train_set.subset(config.train_limit)
    if config.val_limit:
        val_set = val_set.subset(config.val_limit)
    return train_set, val_set


def train_cells(config: ExperimentConfig) -> List[Tuple[EncodingKind, int, float, int]]:
    """Sweep grid (encoding, layers, scaling, seed) in output order"""
    return [(encoding, layers, scaling, seed)
            for encoding in config.encodings
            for layers in config.layers
            for scaling in config.sweep_scalings
            for seed in config.seeds]


def _run_train(config: ExperimentConfig, verbose: bool) -> List[str]:
    train_set, val_set = _load_data(config)
    train_config = replace(config.train, jobs=1)
    log_dir = os.path.join(config.out_dir, f"{config.kind}_logs")
    os.makedirs(log_dir, exist_ok=True)

    def run_cell(cell):
        encoding, layers, scaling, seed = cell
        spec = CircuitSpec(encoding, n_features=4, scaling=scaling, layers=layers)
        model = init_model(spec, train_set.image_shape, train_set.n_classes,
                           stride=train_config.stride, seed=seed)
        log = train(model, train_set, train_config, val=val_set, seed=seed)
        key = f"{encoding.value}_L{layers}_f{format_scaling(scaling).replace('/', '_')}_s{seed}"
        log.write_csv(os.path.join(log_dir, f"{key}.csv"), config.header())
        last = log.records[-1]
        return {
            "encoding": encoding.value,
            "layers": layers,
            "scaling": format_scaling(scaling),
            "seed": seed,
            "best_train_accuracy": repr(log.best_train_accuracy),
            "best_val_accuracy": repr(log.best_val_accuracy),
            "best_epoch": log.best_epoch,
            "final_train_loss": repr(last.train_loss),
            "final_val_loss": repr(last.val_loss),
            "log_digest": log.digest(),
        }

    path = os.path.join(config.out_dir, f"{config.kind}.csv")
    rows = _run_cells(config, train_cells(config), run_cell, path, TRAIN_COLUMNS, verbose,
                      describe=lambda c: f"{c[0].value} L={c[1]} f={format_scaling(c[2])} seed={c[3]}")

    summary = aggregate_rows(rows)
    summary_path = os.path.join(config.out_dir, f"{config.kind}_summary.csv")
    write_csv(summary_path, SUMMARY_COLUMNS, summary, config.header())
    written = [path, summary_path]

    if config.plots:
        figure = os.path.join(config.out_dir, f"{config.kind}.svg")
        if config.kind == "scaling_sweep":
            drawn = plot_accuracy_vs_scaling(summary, figure)
        else:
            drawn = plot_accuracy_vs_layers(summary, figure)
        if drawn:
            written.append(figure)
    return written


def _run_cells(config: ExperimentConfig, cells, fn, path: str, columns: Sequence[str],
               verbose: bool, describe=None, jobs: Optional[int] = None) -> List[Dict]:
    """
    Run cells `jobs` at a time, flushing what finished if interrupted

    Each chunk runs on the task pool; rows are merged in cell order.
    """
    jobs = config.jobs if jobs is None else jobs
    pool = TaskPool(jobs, verbose=verbose)
    rows = []
    try:
        for start in range(0, len(cells), jobs):
            rows.extend(pool.run(fn, cells[start:start + jobs], describe))
    except KeyboardInterrupt:
        logger.warning("Interrupted after %d of %d cells; writing partial results to %s",
                       len(rows), len(cells), path)
        write_csv(path, columns, rows, config.header() + ["status: interrupted"])
        raise
    write_csv(path, columns, rows, config.header())
    return rows


def metric_cells(config: ExperimentConfig) -> List[Tuple[EncodingKind, int, float, int]]:
    """Metric grid (encoding, layers, scaling, seed) in output order"""
    return [(encoding, layers, scaling, seed)
            for encoding in config.encodings
            for layers in config.layers
            for scaling in config.scalings
            for seed in config.seeds]


def _run_metrics(config: ExperimentConfig, verbose: bool) -> List[str]:
    path = os.path.join(config.out_dir, "metrics.csv")

    def run_cell(cell):
        encoding, layers, scaling, seed = cell
        spec = CircuitSpec(encoding, n_features=4, scaling=scaling, layers=layers)
        row = circuit_metrics(spec, replace(config.metrics, seed=seed), jobs=config.jobs).to_row()
        row["scaling"] = format_scaling(scaling)
        row["seed"] = seed
        return row

    # Cells run one at a time; `jobs` parallelizes the samples inside each cell
    rows = _run_cells(config, metric_cells(config), run_cell, path, METRIC_COLUMNS, verbose,
                      describe=lambda c: f"{c[0].value} L={c[1]} f={format_scaling(c[2])} seed={c[3]}",
                      jobs=1)

    summary_path = os.path.join(config.out_dir, "metrics_summary.csv")
    summary = aggregate_rows(rows, metrics=CIRCUIT_METRICS)
    write_csv(summary_path, METRIC_SUMMARY_COLUMNS, summary, config.header())
    written = [path, summary_path]

    train_summary_path = os.path.join(config.out_dir, "train_sweep_summary.csv")
    if config.plots and os.path.exists(train_summary_path):
        _, train_summary = read_csv(train_summary_path)
        figure = os.path.join(config.out_dir, "metrics_vs_accuracy.svg")
        if plot_metric_vs_accuracy(rows, train_summary, figure):
            written.append(figure)
    return written


def _write_fourier_tables(config: ExperimentConfig, rows, stats, dof,
                          status: Sequence[str] = ()) -> List[str]:
    written = []
    header = config.header() + list(status)
    for name, columns, content in (("fourier.csv", FOURIER_COLUMNS, rows),
                                   ("fourier_stats.csv", FOURIER_STATS_COLUMNS, stats),
                                   ("fourier_dof.csv", DOF_COLUMNS, dof)):
        path = os.path.join(config.out_dir, name)
        write_csv(path, columns, content, header)
        written.append(path)
    return written


def _run_fourier(config: ExperimentConfig, verbose: bool) -> List[str]:
    scaling = config.fourier_scaling or grid_periodic_scaling(config.fourier.grid_points)
    encodings = [e for e in config.encodings if e is not EncodingKind.AMPLITUDE]
    if len(encodings) < len(config.encodings):
        logger.warning("Skipping amplitude encoding: univariate spectra are not defined for it")

    written = []
    rows, stats, dof = [], [], []
    cells = [(encoding, layers, seed) for encoding in encodings for layers in config.layers
             for seed in config.seeds]
    try:
        for encoding, layers, seed in cells:
            spec = CircuitSpec(encoding, n_features=4, scaling=scaling, layers=layers)
            fourier_config = replace(config.fourier, seed=seed)
            if verbose:
                print(f"  - sampling spectrum of {spec.label()} seed={seed} "
                      f"({fourier_config.n_weight_draws} weight draws)")
            spectrum = sample_spectrum(spec, config=fourier_config, jobs=config.jobs)

            key = f"{spec.label()}_s{seed}"
            dump = os.path.join(config.out_dir, f"fourier_{key}.csv")
            tmp = f"{dump}.tmp"
            spectrum.write_csv(tmp, config.header())
            os.replace(tmp, dump)
            written.append(dump)

            ranks = spectrum.nonnull_ranks()
            rows.append({
                "encoding": encoding.value,
                "layers": layers,
                "scaling": format_scaling(scaling),
                "seed": seed,
                "n_weight_draws": fourier_config.n_weight_draws,
                "nonnull_ranks": ";".join(str(int(r)) for r in ranks),
                "max_nonnull_ranks": int(ranks.max()),
                "max_abs_imag": repr(spectrum.max_abs_imag()),
            })
            for entry in spectrum.summary():
                stats.append({"encoding": encoding.value, "layers": layers, "seed": seed, **entry})
            if seed == config.seeds[0]:
                dof.append({"encoding": encoding.value, **dof_report(spec).to_row()})

            if config.plots:
                figure = os.path.join(config.out_dir, f"fourier_{key}.svg")
                if plot_spectrum(spectrum, figure):
                    written.append(figure)
    except KeyboardInterrupt:
        logger.warning("Interrupted after %d of %d spectra; writing partial results to %s",
                       len(rows), len(cells), config.out_dir)
        _write_fourier_tables(config, rows, stats, dof, ["status: interrupted"])
        raise

    return written + _write_fourier_tables(config, rows, stats, dof)


def run(config: ExperimentConfig, verbose: bool = False) -> List[str]:
    """
    Run one experiment and return the paths written

    Raises:
        ConfigError: Missing dataset or invalid sub-config
        QccnnError: Any runtime failure of the experiment
        KeyboardInterrupt: After flushing partial results
    """
    os.makedirs(config.out_dir, exist_ok=True)
    logger.info("Running %s experiment into %s", config.kind, config.out_dir)
    if verbose:
        print(f"Experiment '{config.kind}': {len(config.encodings)} encoding(s), "
              f"layers {list(config.layers)}, seeds {list(config.seeds)}")

    if config.kind in TRAIN_KINDS:
        written = _run_train(config, verbose)
    elif config.kind == "metrics":
        written = _run_metrics(config, verbose)
    elif config.kind == "fourier":
        written = _run_fourier(config, verbose)
    else:
        raise QccnnError(f"Unhandled experiment kind '{config.kind}'")

    if verbose:
        for path in written:
            print(f"  wrote {path}")
    return written
