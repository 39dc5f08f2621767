#!/usr/bin/env python3
"""
Metrics - Expressibility, entanglement capability and normalized effective
dimension of a reuploading circuit

All estimators draw their randomness per (seed, stream, draw index), so
results are reproducible and independent of how draws are scheduled.
"""
import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp, rel_entr

from src.encodings import CircuitSpec, EncodingKind, ParamVector, born_probabilities, final_state
from src.errors import ConfigError, ContractViolation, NonFiniteError
from src.gradients import parameter_shift_jacobian
from src.pool import TaskPool
from src.statevector import Statevector, fidelity

logger = logging.getLogger(__name__)

# Probabilities are clamped here before division/log in the Fisher estimate
PROB_CLAMP = 1e-12

# Independent random streams
STREAM_EXPRESSIBILITY = 1
STREAM_ENTANGLEMENT = 2
STREAM_FISHER_THETA = 3
STREAM_FISHER_LABELS = 4


@dataclass(frozen=True)
class MetricsConfig:
    """Sample counts and constants for the three circuit metrics"""
    n_fidelity_pairs: int = 5000
    n_bins: int = 75
    n_entanglement_samples: int = 5000
    n_theta_samples: int = 100
    n_data_samples: int = 100
    gamma: float = 1.0
    n_effective: int = 100_000
    seed: int = 0

    def __post_init__(self):
        for name in ("n_fidelity_pairs", "n_entanglement_samples", "n_theta_samples",
                     "n_data_samples"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1", field=name)
        if self.n_bins < 2:
            raise ConfigError("n_bins must be >= 2", field="n_bins")
        if not 0 < self.gamma <= 1:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}", field="gamma")
        if self.n_effective < 2:
            raise ConfigError("n_effective must be >= 2", field="n_effective")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative", field="seed")

    @property
    def kappa(self) -> float:
        """gamma * n / (2 pi log n)"""
        return self.gamma * self.n_effective / (2 * np.pi * np.log(self.n_effective))


@dataclass
class MetricsReport:
    """The three metric values for one circuit"""
    expressibility: float
    entanglement: float
    normalized_effective_dimension: float
    spec: CircuitSpec
    config: MetricsConfig

    def to_row(self) -> dict:
        return {
            "encoding": self.spec.encoding.value,
            "layers": self.spec.layers,
            "scaling": repr(float(self.spec.scaling)),
            "n_qubits": self.spec.n_qubits,
            "expressibility": repr(float(self.expressibility)),
            "entanglement": repr(float(self.entanglement)),
            "normalized_effective_dimension": repr(float(self.normalized_effective_dimension)),
            "config_hash": config_hash(self.config),
        }


def config_hash(config: MetricsConfig) -> str:
    """Short stable digest of a MetricsConfig"""
    payload = json.dumps(asdict(config), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:12]


def draw_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Generator for one draw; a pure function of (seed, stream, index)"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


def reference_input(spec: CircuitSpec) -> np.ndarray:
    """Fixed all-zeros input used when characterizing the parameterized part"""
    return np.zeros(spec.n_features)


# --- Expressibility -----------------------------------------------------------

def haar_pdf(F: float, N: int) -> float:
    """Fidelity density of Haar-random pure states: (N-1)(1-F)^(N-2)"""
    if N < 2:
        raise ContractViolation(f"Hilbert dimension must be >= 2, got {N}")
    if not 0.0 <= F <= 1.0:
        raise ContractViolation(f"Fidelity must lie in [0, 1], got {F}")
    return float((N - 1) * (1 - F) ** (N - 2))


def haar_bin_masses(N: int, n_bins: int) -> np.ndarray:
    """Exact Haar probability mass of each uniform fidelity bin"""
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    cdf_complement = (1 - edges) ** (N - 1)
    return cdf_complement[:-1] - cdf_complement[1:]


def kl_to_haar(fidelities: Sequence[float], n_qubits: int, n_bins: int = 75) -> float:
    """KL(binned fidelity histogram || binned Haar distribution), in nats

    Empty histogram bins contribute nothing (0 log 0 = 0).
    """
    fidelities = np.asarray(fidelities, dtype=float)
    if len(fidelities) == 0:
        raise ContractViolation("Need at least one fidelity sample")
    counts, _ = np.histogram(np.clip(fidelities, 0.0, 1.0), bins=n_bins, range=(0.0, 1.0))
    estimated = counts / len(fidelities)
    haar = haar_bin_masses(2 ** n_qubits, n_bins)
    return float(np.sum(rel_entr(estimated, haar)))


def fidelity_samples(spec: CircuitSpec, config: MetricsConfig, jobs: int = 1) -> np.ndarray:
    """Fidelities between circuit states for random parameter doublets"""
    x = reference_input(spec)

    def one_pair(index):
        rng = draw_rng(config.seed, STREAM_EXPRESSIBILITY, index)
        first = final_state(spec, x, ParamVector.random(spec, rng))
        second = final_state(spec, x, ParamVector.random(spec, rng))
        return fidelity(first, second)

    pool = TaskPool(jobs)
    return np.array(pool.run(one_pair, range(config.n_fidelity_pairs)))


def expressibility(spec: CircuitSpec, config: MetricsConfig, jobs: int = 1) -> float:
    """KL divergence to Haar; lower means more expressible"""
    fidelities = fidelity_samples(spec, config, jobs)
    return kl_to_haar(fidelities, spec.n_qubits, config.n_bins)


# --- Entanglement -------------------------------------------------------------

def meyer_wallach(state: Statevector) -> float:
    """Meyer-Wallach measure Q: 0 for product states, 1 for e.g. Bell/GHZ"""
    n = state.n_qubits
    if n < 2:
        raise ContractViolation("Meyer-Wallach measure needs at least 2 qubits")

    tensor = state.amplitudes.reshape((2,) * n)
    total = 0.0
    for qubit in range(n):
        axis = n - 1 - qubit
        # iota_j(0) and iota_j(1): amplitudes with qubit j fixed, qubit j deleted
        u = np.take(tensor, 0, axis=axis).reshape(-1)
        v = np.take(tensor, 1, axis=axis).reshape(-1)
        # D(u, v) = 1/2 sum_ij |u_i v_j - u_j v_i|^2, via the Lagrange identity
        distance = np.vdot(u, u).real * np.vdot(v, v).real - abs(np.vdot(u, v)) ** 2
        total += distance
    return float(np.clip(4.0 * total / n, 0.0, 1.0))


def entanglement_capability(spec: CircuitSpec, config: MetricsConfig, jobs: int = 1) -> float:
    """Average Meyer-Wallach measure over random parameter draws"""
    if spec.n_qubits < 2:
        raise ContractViolation(f"{spec.label()} acts on a single qubit")
    x = reference_input(spec)

    def one_draw(index):
        rng = draw_rng(config.seed, STREAM_ENTANGLEMENT, index)
        return meyer_wallach(final_state(spec, x, ParamVector.random(spec, rng)))

    pool = TaskPool(jobs)
    values = pool.run(one_draw, range(config.n_entanglement_samples))
    return float(np.mean(values))


# --- Fisher information and effective dimension ---------------------------------

class QuantumLayerModel:
    """Quantum layer read out as the Born distribution over basis states

    Any object with `n_params`, `probabilities(x, theta)`, `jacobian(x, theta)`
    and `sample_inputs(n, rng)` can be handed to the Fisher estimators.
    """

    def __init__(self, spec: CircuitSpec):
        self.spec = spec
        self.n_params = spec.n_params

    def probabilities(self, x, theta) -> np.ndarray:
        return born_probabilities(self.spec, x, theta)

    def jacobian(self, x, theta) -> np.ndarray:
        """d p(y | x; theta) / d theta, shaped (2^n, n_params)"""
        return parameter_shift_jacobian(lambda v: born_probabilities(self.spec, x, v), theta)

    def sample_inputs(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Pixel-range inputs, uniform in [-1, 1]"""
        return rng.uniform(-1.0, 1.0, size=(n, self.spec.n_features))


def fisher_information(model, theta, inputs, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Monte-Carlo Fisher information at theta

    Labels are drawn from the model's own predictive distribution, one per input.

    Returns:
        Symmetric positive-semidefinite d x d matrix
    """
    theta = np.asarray(getattr(theta, "values", theta), dtype=float)
    rng = rng if rng is not None else np.random.default_rng(0)
    d = model.n_params
    fisher = np.zeros((d, d))
    inputs = list(inputs)
    if not inputs:
        raise ContractViolation("Need at least one input sample")

    for x in inputs:
        probs = np.asarray(model.probabilities(x, theta), dtype=float)
        jac = np.asarray(model.jacobian(x, theta), dtype=float).reshape(len(probs), d)
        label = rng.choice(len(probs), p=probs / probs.sum())
        score = jac[label] / max(probs[label], PROB_CLAMP)
        fisher += np.outer(score, score)
    return fisher / len(inputs)


def effective_dimension(fishers: np.ndarray, thetas: np.ndarray, config: MetricsConfig) -> float:
    """Effective dimension from Fisher matrices sampled over parameter space"""
    fishers = np.asarray(fishers, dtype=float)
    n_samples, d, _ = fishers.shape
    kappa = config.kappa
    if kappa <= 1:
        raise ConfigError(
            f"gamma * n / (2 pi log n) must exceed 1, got {kappa:.4f}", field="n_effective"
        )

    # Trace normalization: average trace of F-hat equals d
    mean_trace = np.trace(np.mean(fishers, axis=0))
    if mean_trace <= 0:
        return 0.0
    fhat = d * fishers / mean_trace

    half_logdets = np.empty(n_samples)
    identity = np.eye(d)
    for i in range(n_samples):
        sign, logdet = np.linalg.slogdet(identity + kappa * fhat[i])
        if sign <= 0 or not np.isfinite(logdet):
            raise NonFiniteError(
                f"Non-finite determinant at theta sample {i}: {thetas[i]}", theta=thetas[i]
            )
        half_logdets[i] = logdet / 2

    # The uniform Monte-Carlo average absorbs the parameter-space volume
    log_volume_average = logsumexp(half_logdets) - np.log(n_samples)
    return float(2 * log_volume_average / np.log(kappa))


def normalized_effective_dimension(model, config: MetricsConfig, jobs: int = 1) -> float:
    """Effective dimension divided by the parameter count"""
    d = model.n_params
    rng = draw_rng(config.seed, STREAM_FISHER_THETA, 0)
    thetas = rng.uniform(0.0, 2 * np.pi, size=(config.n_theta_samples, d))
    inputs = model.sample_inputs(config.n_data_samples, rng)

    def one_theta(index):
        return fisher_information(model, thetas[index], inputs,
                                  draw_rng(config.seed, STREAM_FISHER_LABELS, index))

    pool = TaskPool(jobs)
    fishers = np.array(pool.run(one_theta, range(config.n_theta_samples)))
    ned = effective_dimension(fishers, thetas, config) / d
    if ned > 1.0:
        logger.info("Effective dimension %.4f exceeds the parameter count; clipped to 1",
                    ned * d)
        ned = 1.0
    return max(ned, 0.0)


def circuit_metrics(spec: CircuitSpec, config: MetricsConfig, jobs: int = 1) -> MetricsReport:
    """Compute all three metrics for one spec"""
    if spec.encoding is EncodingKind.AMPLITUDE:
        logger.debug("Amplitude reference input is all zeros; the uniform vector is encoded")
    return MetricsReport(
        expressibility=expressibility(spec, config, jobs),
        entanglement=entanglement_capability(spec, config, jobs),
        normalized_effective_dimension=normalized_effective_dimension(
            QuantumLayerModel(spec), config, jobs
        ),
        spec=spec,
        config=config,
    )
