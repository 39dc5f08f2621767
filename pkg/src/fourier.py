#!/usr/bin/env python3
"""
Fourier - Univariate Fourier spectra of circuit outputs and the
degrees-of-freedom count of the parallel ansatz
"""
import csv
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.encodings import CircuitSpec, EncodingKind, ParamVector, execute
from src.errors import ConfigError, ContractViolation, UnsupportedEncodingError
from src.metrics import draw_rng
from src.pool import TaskPool

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 21
DEFAULT_COEFFS = 10
DEFAULT_WEIGHT_DRAWS = 100

# |c| at or below this counts as a null frequency
NULL_THRESHOLD = 1e-6

STREAM_SPECTRUM = 5

# Local dimension d per encoding
LOCAL_DIMENSION = {
    EncodingKind.ANGLE_X: 2,
    EncodingKind.ANGLE_Y: 2,
    EncodingKind.HIGHER_ORDER: 4,
}


@dataclass(frozen=True)
class FourierConfig:
    """Sampling setup of the univariate spectrum experiment"""
    n_weight_draws: int = DEFAULT_WEIGHT_DRAWS
    grid_points: int = DEFAULT_GRID_POINTS
    n_coeffs: int = DEFAULT_COEFFS
    seed: int = 0

    def __post_init__(self):
        if self.n_weight_draws < 1:
            raise ConfigError("n_weight_draws must be >= 1", field="n_weight_draws")
        if self.n_coeffs < 1:
            raise ConfigError("n_coeffs must be >= 1", field="n_coeffs")
        if self.grid_points < 2 * self.n_coeffs + 1:
            raise ConfigError(
                f"grid_points must be >= 2 * n_coeffs + 1 = {2 * self.n_coeffs + 1}",
                field="grid_points",
            )
        if self.seed < 0:
            raise ConfigError("seed must be non-negative", field="seed")

    def grid(self) -> np.ndarray:
        return input_grid(self.grid_points)


@dataclass
class SpectrumSample:
    """Coefficients of one weight draw, DC at index 0"""
    weights: ParamVector
    per_qubit_coefficients: np.ndarray


@dataclass
class FourierSpectrum:
    """Coefficient clouds of a spec over many weight draws"""
    spec: CircuitSpec
    samples: List[SpectrumSample]
    input_grid: np.ndarray
    outputs: List[np.ndarray] = field(default_factory=list)

    def coefficients(self) -> np.ndarray:
        """All coefficients shaped (draws, qubits, n_coeffs + 1)"""
        return np.stack([s.per_qubit_coefficients for s in self.samples])

    def nonnull_ranks(self, threshold: float = NULL_THRESHOLD) -> np.ndarray:
        """Per qubit, how many ranks >= 1 exceed the threshold in some draw"""
        magnitudes = np.abs(self.coefficients())[:, :, 1:]
        return np.sum(np.max(magnitudes, axis=0) > threshold, axis=1)

    def max_abs_imag(self) -> float:
        return float(np.max(np.abs(self.coefficients().imag)))

    def summary(self, threshold: float = NULL_THRESHOLD) -> List[Dict]:
        """Mean, (Re, Im) covariance and non-null fraction per (qubit, rank)"""
        coeffs = self.coefficients()
        rows = []
        for qubit in range(coeffs.shape[1]):
            for rank in range(coeffs.shape[2]):
                values = coeffs[:, qubit, rank]
                if len(values) > 1:
                    cov = np.cov(np.vstack([values.real, values.imag]))
                else:
                    cov = np.zeros((2, 2))
                mean = values.mean()
                rows.append({
                    "qubit": qubit,
                    "rank": rank,
                    "mean_re": float(mean.real),
                    "mean_im": float(mean.imag),
                    "cov_re_re": float(cov[0, 0]),
                    "cov_re_im": float(cov[0, 1]),
                    "cov_im_im": float(cov[1, 1]),
                    "nonnull_fraction": float(np.mean(np.abs(values) > threshold)),
                })
        return rows

    def write_csv(self, path: str, header: Sequence[str] = ()):
        """Dump every coefficient as (draw, qubit, rank, re, im)"""
        coeffs = self.coefficients()
        with open(path, "w", newline="") as f:
            for line in header:
                f.write(f"# {line}\n")
            writer = csv.writer(f)
            writer.writerow(["draw", "qubit", "rank", "re", "im"])
            for draw in range(coeffs.shape[0]):
                for qubit in range(coeffs.shape[1]):
                    for rank in range(coeffs.shape[2]):
                        c = coeffs[draw, qubit, rank]
                        writer.writerow([draw, qubit, rank, repr(float(c.real)), repr(float(c.imag))])


@dataclass
class DofReport:
    """Parameter count versus Fourier degrees of freedom"""
    d: int
    M: int
    L: int
    n_params: int
    degree: int
    nu: int
    saturated: bool

    def to_row(self) -> dict:
        return {
            "d": self.d, "M": self.M, "L": self.L, "n_params": self.n_params,
            "degree": self.degree, "nu": self.nu, "saturated": int(self.saturated),
        }


def input_grid(grid_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Ordered, linearly spaced inputs over [-1, 1]"""
    return np.linspace(-1.0, 1.0, grid_points)


def grid_periodic_scaling(grid_points: int = DEFAULT_GRID_POINTS) -> float:
    """Scaling for which the grid spans exactly one period of frequency 1

    With this f, integer circuit frequencies fall on DFT bins and no leakage
    occurs (20 pi / 21 for the 21-point grid).
    """
    spacing = 2.0 / (grid_points - 1)
    return 2 * np.pi / (grid_points * spacing)


def _check_univariate(spec: CircuitSpec):
    if spec.encoding is EncodingKind.AMPLITUDE:
        raise UnsupportedEncodingError(
            "Univariate spectra are not defined for amplitude encoding (state normalization)"
        )


def univariate_outputs(spec: CircuitSpec, params, grid) -> np.ndarray:
    """Per-qubit <Z> with the same input t fed to every feature, shaped (qubits, len(grid))"""
    _check_univariate(spec)
    grid = np.asarray(grid, dtype=float)
    outputs = np.empty((spec.n_qubits, len(grid)))
    for i, t in enumerate(grid):
        outputs[:, i] = execute(spec, np.full(spec.n_features, t), params)
    return outputs


def dft_coefficients(samples) -> np.ndarray:
    """One-sided DFT with 1/K normalization: c_k = (1/K) sum_j s_j exp(-2 pi i j k / K)"""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or len(samples) < 2:
        raise ContractViolation(f"Need a 1-D series of at least 2 samples, got shape {samples.shape}")
    return np.fft.rfft(samples) / len(samples)


def centred_coefficients(samples) -> np.ndarray:
    """dft_coefficients with phases referenced to the grid centre t = 0"""
    samples = np.asarray(samples, dtype=float)
    return dft_coefficients(np.fft.ifftshift(samples))


def reconstruct_series(coefficients, n_samples: int) -> np.ndarray:
    """Inverse of centred_coefficients using conjugate symmetry c_-k = c_k*"""
    series = np.fft.irfft(np.asarray(coefficients) * n_samples, n=n_samples)
    return np.fft.fftshift(series)


def sample_spectrum(spec: CircuitSpec, n_weight_draws: int = DEFAULT_WEIGHT_DRAWS, seed: int = 0,
                    config: Optional[FourierConfig] = None, jobs: int = 1) -> FourierSpectrum:
    """Spectra of the univariate outputs for random weights uniform in [0, 2pi)"""
    _check_univariate(spec)
    if config is None:
        config = FourierConfig(n_weight_draws=n_weight_draws, seed=seed)
    grid = config.grid()
    keep = config.n_coeffs + 1

    def one_draw(index):
        rng = draw_rng(config.seed, STREAM_SPECTRUM, index)
        weights = ParamVector.random(spec, rng)
        outputs = univariate_outputs(spec, weights, grid)
        coeffs = np.stack([centred_coefficients(row)[:keep] for row in outputs])
        return SpectrumSample(weights, coeffs), outputs

    pool = TaskPool(jobs)
    results = pool.run(one_draw, range(config.n_weight_draws))
    return FourierSpectrum(
        spec=spec,
        samples=[sample for sample, _ in results],
        input_grid=grid,
        outputs=[outputs for _, outputs in results],
    )


def local_dimension(encoding: EncodingKind) -> int:
    if encoding not in LOCAL_DIMENSION:
        raise UnsupportedEncodingError(f"No local dimension defined for {encoding.value}")
    return LOCAL_DIMENSION[encoding]


def dof_report(spec: CircuitSpec) -> DofReport:
    """Parameter count (d^2M - 1)(L + 1) against degrees of freedom (2D + 1)^M"""
    d = local_dimension(spec.encoding)
    M, L = spec.n_qubits, spec.layers
    n_params = (d ** (2 * M) - 1) * (L + 1)
    degree = (d - 1) * L
    nu = (2 * degree + 1) ** M
    return DofReport(d=d, M=M, L=L, n_params=n_params, degree=degree, nu=nu,
                     saturated=n_params >= nu)


def saturation_layer(encoding: EncodingKind, n_qubits: int = 4, max_layers: int = 64) -> int:
    """Largest layer count whose parameters still cover every Fourier degree of freedom"""
    last = 0
    for layers in range(1, max_layers + 1):
        spec = CircuitSpec(encoding, n_features=n_qubits, layers=layers)
        if not dof_report(spec).saturated:
            break
        last = layers
    return last

