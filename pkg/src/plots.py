#!/usr/bin/env python3
"""
Plots - SVG figures for sweep summaries, metrics and Fourier coefficient clouds

Plotting is best effort: every function returns False and logs a warning
instead of raising, so figures never gate the CSV outputs.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Sequence

logger = logging.getLogger(__name__)


def _pyplot():
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        return plt
    except ImportError as e:
        logger.warning("Plotting unavailable: %s", e)
        return None


def _save(fig, plt, path: str) -> bool:
    try:
        fig.tight_layout()
        fig.savefig(path, format="svg")
        return True
    except Exception as e:
        logger.warning("Could not write plot %s: %s", path, e)
        return False
    finally:
        plt.close(fig)


def _series(rows: Sequence[Dict], x_key: str, y_key: str) -> Dict[str, List]:
    """Group rows by encoding into sorted (x, y, std) series"""
    grouped = defaultdict(list)
    for row in rows:
        std_key = y_key.replace("_mean", "_std")
        grouped[row["encoding"]].append(
            (float(row[x_key]), float(row[y_key]), float(row.get(std_key, 0.0) or 0.0))
        )
    return {name: sorted(points) for name, points in grouped.items()}


def plot_accuracy_vs(summary_rows: Sequence[Dict], x_key: str, path: str,
                     x_label: str, log_x: bool = False) -> bool:
    """Mean best train/validation accuracy per encoding with std error bands"""
    plt = _pyplot()
    if plt is None or not summary_rows:
        return False
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, split in zip(axes, ("train", "val")):
        for name, points in _series(summary_rows, x_key, f"best_{split}_accuracy_mean").items():
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            errs = [p[2] for p in points]
            ax.plot(xs, ys, marker="o", label=name)
            ax.fill_between(xs, [y - e for y, e in zip(ys, errs)],
                            [y + e for y, e in zip(ys, errs)], alpha=0.2)
        ax.set_title(f"best {split} accuracy")
        ax.set_xlabel(x_label)
        if log_x:
            ax.set_xscale("log", base=2)
        ax.grid(True, alpha=0.3)
    axes[0].set_ylabel("accuracy")
    axes[1].legend(fontsize=8)
    return _save(fig, plt, path)


def plot_accuracy_vs_layers(summary_rows: Sequence[Dict], path: str) -> bool:
    return plot_accuracy_vs(summary_rows, "layers", path, "reuploading layers")


def plot_accuracy_vs_scaling(summary_rows: Sequence[Dict], path: str) -> bool:
    return plot_accuracy_vs(summary_rows, "scaling_value", path, "scaling factor f (rad)", log_x=True)


def plot_metric_vs_accuracy(metric_rows: Sequence[Dict], summary_rows: Sequence[Dict],
                            path: str) -> bool:
    """One panel per metric: metric value against mean best validation accuracy"""
    plt = _pyplot()
    if plt is None or not metric_rows or not summary_rows:
        return False
    accuracy = {(r["encoding"], str(r["layers"])): float(r["best_val_accuracy_mean"])
                for r in summary_rows}
    metrics = ("expressibility", "entanglement", "normalized_effective_dimension")
    fig, axes = plt.subplots(1, len(metrics), figsize=(12, 4))
    for ax, metric in zip(axes, metrics):
        grouped = defaultdict(list)
        for row in metric_rows:
            key = (row["encoding"], str(row["layers"]))
            if key in accuracy:
                grouped[row["encoding"]].append((float(row[metric]), accuracy[key]))
        for name, points in grouped.items():
            ax.scatter([p[0] for p in points], [p[1] for p in points], label=name)
        ax.set_xlabel(metric.replace("_", " "))
        ax.grid(True, alpha=0.3)
    axes[0].set_ylabel("mean best validation accuracy")
    axes[-1].legend(fontsize=8)
    return _save(fig, plt, path)


def plot_spectrum(spectrum, path: str) -> bool:
    """Complex-plane scatter of Fourier coefficients, one row per qubit, one column per rank"""
    plt = _pyplot()
    if plt is None:
        return False
    coeffs = spectrum.coefficients()
    n_qubits, n_ranks = coeffs.shape[1], coeffs.shape[2]
    fig, axes = plt.subplots(n_qubits, n_ranks, figsize=(1.6 * n_ranks, 1.6 * n_qubits),
                             squeeze=False)
    for qubit in range(n_qubits):
        for rank in range(n_ranks):
            ax = axes[qubit][rank]
            values = coeffs[:, qubit, rank]
            ax.scatter(values.real, values.imag, s=4)
            ax.tick_params(labelsize=5)
            if qubit == 0:
                ax.set_title(f"c{rank}", fontsize=7)
            if rank == 0:
                ax.set_ylabel(f"qubit {qubit}", fontsize=7)
    fig.suptitle(spectrum.spec.label(), fontsize=9)
    return _save(fig, plt, path)
