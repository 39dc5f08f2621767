#!/usr/bin/env python3
"""
Encodings - Data-encoding blocks S(x), the basic entangling ansatz W(theta),
and the data-reuploading circuit built from them
"""
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Optional

import numpy as np

from src.errors import ConfigError, DimensionMismatchError
from src.statevector import (
    Statevector, apply_gates, apply_mottonen, cnot, expectations_z, hadamard,
    rx, ry, rz, rzz, zero_state,
)

logger = logging.getLogger(__name__)

# Default input rescaling factor f
DEFAULT_SCALING = np.pi / 4


class EncodingKind(Enum):
    """How classical features enter the circuit"""
    ANGLE_X = "angle_x"
    ANGLE_Y = "angle_y"
    HIGHER_ORDER = "higher_order"
    AMPLITUDE = "amplitude"

    @classmethod
    def parse(cls, name: str) -> "EncodingKind":
        """Accept 'angle_x', 'AngleX', 'angle-x' and similar spellings"""
        key = name.strip().lower().replace("-", "_")
        aliases = {
            "anglex": "angle_x", "rx": "angle_x",
            "angley": "angle_y", "ry": "angle_y",
            "higherorder": "higher_order", "higher": "higher_order",
            "amp": "amplitude",
        }
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ConfigError(f"Unknown encoding '{name}'", field="encoding")


@dataclass(frozen=True)
class CircuitSpec:
    """Encoding, scaling and layer count of one reuploading circuit

    `entangling=False` drops the ansatz CNOTs; it is a diagnostic mode used
    to check entanglement estimators against product states.
    """
    encoding: EncodingKind
    n_features: int = 4
    scaling: float = DEFAULT_SCALING
    layers: int = 1
    entangling: bool = True

    def __post_init__(self):
        if isinstance(self.encoding, str):
            object.__setattr__(self, "encoding", EncodingKind.parse(self.encoding))
        if self.n_features < 1:
            raise ConfigError(f"n_features must be positive, got {self.n_features}",
                              field="n_features")
        if self.layers < 1:
            raise ConfigError(f"layers must be >= 1, got {self.layers}", field="layers")
        if not self.scaling > 0:
            raise ConfigError(f"scaling must be > 0, got {self.scaling}", field="scaling")
        if self.encoding is EncodingKind.AMPLITUDE:
            n = self.n_features
            if n < 2 or n & (n - 1):
                raise ConfigError(
                    f"Amplitude encoding needs a power-of-two feature count >= 2, got {n}",
                    field="n_features",
                )

    @property
    def n_qubits(self) -> int:
        if self.encoding is EncodingKind.AMPLITUDE:
            return self.n_features.bit_length() - 1
        return self.n_features

    @property
    def n_params(self) -> int:
        return self.layers * self.n_qubits

    def label(self) -> str:
        return f"{self.encoding.value}_L{self.layers}"


@dataclass
class ParamVector:
    """Trainable RX angles, flat-indexed as layer * n_qubits + qubit"""
    values: np.ndarray
    layers: int
    n_qubits: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if len(self.values) != self.layers * self.n_qubits:
            raise DimensionMismatchError(
                f"Expected {self.layers * self.n_qubits} parameters "
                f"({self.layers} layers x {self.n_qubits} qubits), got {len(self.values)}"
            )

    @classmethod
    def zeros(cls, spec: CircuitSpec) -> "ParamVector":
        return cls(np.zeros(spec.n_params), spec.layers, spec.n_qubits)

    @classmethod
    def random(cls, spec: CircuitSpec, rng: np.random.Generator) -> "ParamVector":
        """Angles uniform in [0, 2pi)"""
        return cls(rng.uniform(0.0, 2 * np.pi, spec.n_params), spec.layers, spec.n_qubits)

    @classmethod
    def for_spec(cls, spec: CircuitSpec, values) -> "ParamVector":
        return cls(values, spec.layers, spec.n_qubits)

    def layer(self, index: int) -> np.ndarray:
        start = index * self.n_qubits
        return self.values[start:start + self.n_qubits]

    def shifted(self, index: int, delta: float) -> "ParamVector":
        values = self.values.copy()
        values[index] += delta
        return ParamVector(values, self.layers, self.n_qubits)

    def __len__(self):
        return len(self.values)


def _check_features(spec: CircuitSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if len(x) != spec.n_features:
        raise DimensionMismatchError(
            f"{spec.encoding.value} spec expects {spec.n_features} features, got {len(x)}"
        )
    return x


def amplitude_vector(spec: CircuitSpec, x) -> np.ndarray:
    """Scaled, L2-normalized amplitudes; an all-zero window becomes uniform"""
    scaled = spec.scaling * _check_features(spec, x)
    norm = np.linalg.norm(scaled)
    if norm == 0:
        logger.debug("Degenerate amplitude window (all zeros); encoding the uniform vector")
        return np.full(spec.n_features, 1 / np.sqrt(spec.n_features))
    return scaled / norm


def encoding_gates(spec: CircuitSpec, x) -> list:
    """Gate list of S(x) for the angle and higher-order encodings"""
    x = _check_features(spec, x)
    angles = spec.scaling * x
    n = spec.n_qubits

    if spec.encoding is EncodingKind.ANGLE_X:
        return [rx(q, angles[q]) for q in range(n)]
    if spec.encoding is EncodingKind.ANGLE_Y:
        return [ry(q, angles[q]) for q in range(n)]
    if spec.encoding is EncodingKind.HIGHER_ORDER:
        gates = [hadamard(q) for q in range(n)]
        gates += [rz(q, angles[q]) for q in range(n)]
        # Second-order term uses f * x_i * x_j on ascending pairs (i < j)
        gates += [rzz(i, j, spec.scaling * x[i] * x[j]) for i, j in combinations(range(n), 2)]
        return gates
    raise ConfigError("Amplitude encoding is not a fixed gate list", field="encoding")


def apply_encoding(state: Statevector, spec: CircuitSpec, x) -> Statevector:
    """Apply S(x) to a state"""
    if spec.encoding is EncodingKind.AMPLITUDE:
        return apply_mottonen(state, amplitude_vector(spec, x))
    return apply_gates(state, encoding_gates(spec, x))


def ansatz_gates(layer_params, n_qubits: int, entangling: bool = True) -> list:
    """RX(theta_i) on each qubit, then the CNOT ring"""
    layer_params = np.asarray(layer_params, dtype=float).reshape(-1)
    if len(layer_params) != n_qubits:
        raise DimensionMismatchError(
            f"Ansatz layer needs {n_qubits} angles, got {len(layer_params)}"
        )

    gates = [rx(q, layer_params[q]) for q in range(n_qubits)]
    if not entangling or n_qubits < 2:
        return gates
    if n_qubits == 2:
        # A closing CNOT(1->0) would not belong to the drawn pattern
        return gates + [cnot(0, 1)]
    gates += [cnot(q, q + 1) for q in range(n_qubits - 1)]
    gates.append(cnot(n_qubits - 1, 0))
    return gates


def apply_ansatz(state: Statevector, layer_params, entangling: bool = True) -> Statevector:
    """Apply one layer of W(theta)"""
    return apply_gates(state, ansatz_gates(layer_params, state.n_qubits, entangling))


def _check_params(spec: CircuitSpec, params) -> ParamVector:
    if not isinstance(params, ParamVector):
        params = ParamVector.for_spec(spec, params)
    if params.layers != spec.layers or params.n_qubits != spec.n_qubits:
        raise DimensionMismatchError(
            f"Parameters shaped {params.layers}x{params.n_qubits} do not match "
            f"spec {spec.layers}x{spec.n_qubits}"
        )
    return params


def final_state(spec: CircuitSpec, x, params, initial: Optional[Statevector] = None) -> Statevector:
    """State after L rounds of encoding followed by an ansatz layer"""
    params = _check_params(spec, params)
    state = initial if initial is not None else zero_state(spec.n_qubits)
    for layer in range(spec.layers):
        state = apply_encoding(state, spec, x)
        state = apply_ansatz(state, params.layer(layer), spec.entangling)
    return state


def execute(spec: CircuitSpec, x, params) -> np.ndarray:
    """Per-qubit <Z> of the full reuploading circuit"""
    return expectations_z(final_state(spec, x, params))


def born_probabilities(spec: CircuitSpec, x, params) -> np.ndarray:
    """Basis-state probabilities of the final state"""
    return final_state(spec, x, params).probabilities()
