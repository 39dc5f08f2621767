#!/usr/bin/env python3
"""
Statevector - Dense complex-amplitude simulation of few-qubit circuits

Conventions:
    - Qubit 0 is the least-significant bit of the basis-state index, so
      amplitude index 0b0110 on 4 qubits means qubits 1 and 2 are |1>.
    - Rotations follow R_P(phi) = exp(-i * phi * P / 2); RZZ(phi) is
      exp(-i * phi * Z(x)Z / 2).
    - Two-qubit gate matrices are written in the basis |t0 t1> with the first
      target as the more significant bit (CNOT: control first).
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import ConfigError, ContractViolation, DegenerateInputError, DimensionMismatchError

# Largest register the dense simulator accepts
QUBIT_CAPACITY = 20

SINGLE_QUBIT_GATES = ("RX", "RY", "RZ", "H")
TWO_QUBIT_GATES = ("CNOT", "RZZ")
PARAMETRIC_GATES = ("RX", "RY", "RZ", "RZZ")

_SQRT2_INV = 1 / np.sqrt(2)
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
_CNOT = np.array([[1, 0, 0, 0],
                  [0, 1, 0, 0],
                  [0, 0, 0, 1],
                  [0, 0, 1, 0]], dtype=complex)


@dataclass
class Statevector:
    """Complex amplitude vector over n qubits"""
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.n_qubits,):
            raise DimensionMismatchError(
                f"Expected {2 ** self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        """Born-rule probabilities of the computational basis states"""
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.n_qubits)


@dataclass(frozen=True)
class Gate:
    """One circuit operation: kind, optional angle in radians, target qubits"""
    kind: str
    targets: Tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))

        if self.kind in SINGLE_QUBIT_GATES:
            expected = 1
        elif self.kind in TWO_QUBIT_GATES:
            expected = 2
        else:
            raise ConfigError(f"Unknown gate kind '{self.kind}'", field="kind")

        if len(self.targets) != expected:
            raise ConfigError(
                f"{self.kind} takes {expected} target(s), got {len(self.targets)}", field="targets"
            )
        if len(set(self.targets)) != len(self.targets):
            raise ConfigError(f"{self.kind} targets must be distinct: {self.targets}", field="targets")
        if any(t < 0 for t in self.targets):
            raise IndexError(f"Negative qubit index in {self.targets}")

        if self.kind in PARAMETRIC_GATES and self.angle is None:
            raise ConfigError(f"{self.kind} requires an angle", field="angle")
        if self.kind not in PARAMETRIC_GATES and self.angle is not None:
            raise ConfigError(f"{self.kind} takes no angle", field="angle")

    def matrix(self) -> np.ndarray:
        """Unitary matrix of the gate (2x2 or 4x4)"""
        if self.kind == "H":
            return _HADAMARD
        if self.kind == "CNOT":
            return _CNOT

        half = self.angle / 2
        c, s = np.cos(half), np.sin(half)
        if self.kind == "RX":
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        if self.kind == "RY":
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.kind == "RZ":
            return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]], dtype=complex)

        # RZZ is diagonal: phase by the parity of the two target bits
        minus, plus = np.exp(-1j * half), np.exp(1j * half)
        return np.diag([minus, plus, plus, minus]).astype(complex)


# Shorthand constructors used throughout the circuit builders
def rx(qubit: int, angle: float) -> Gate:
    return Gate("RX", (qubit,), float(angle))


def ry(qubit: int, angle: float) -> Gate:
    return Gate("RY", (qubit,), float(angle))


def rz(qubit: int, angle: float) -> Gate:
    return Gate("RZ", (qubit,), float(angle))


def hadamard(qubit: int) -> Gate:
    return Gate("H", (qubit,))


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def rzz(qubit_a: int, qubit_b: int, angle: float) -> Gate:
    return Gate("RZZ", (qubit_a, qubit_b), float(angle))


def zero_state(n_qubits: int) -> Statevector:
    """Return |0...0> on n qubits"""
    if not 1 <= n_qubits <= QUBIT_CAPACITY:
        raise ConfigError(
            f"Simulator supports 1..{QUBIT_CAPACITY} qubits, got {n_qubits}", field="n_qubits"
        )
    amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
    amplitudes[0] = 1.0
    return Statevector(amplitudes, n_qubits)


def _apply_matrix(amplitudes: np.ndarray, matrix: np.ndarray, targets: Sequence[int],
                  n_qubits: int) -> np.ndarray:
    """Contract a k-qubit matrix into the amplitude tensor"""
    k = len(targets)
    tensor = amplitudes.reshape((2,) * n_qubits)

    # C-order reshape puts the most significant bit on axis 0
    axes = [n_qubits - 1 - t for t in targets]
    gate = matrix.reshape((2,) * (2 * k))
    result = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), axes))
    result = np.moveaxis(result, list(range(k)), axes)
    return result.reshape(-1)


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Apply one gate and return a fresh state"""
    for target in gate.targets:
        if target >= state.n_qubits:
            raise IndexError(
                f"{gate.kind} target {target} out of range for {state.n_qubits} qubits"
            )
    amplitudes = _apply_matrix(state.amplitudes, gate.matrix(), gate.targets, state.n_qubits)
    return Statevector(amplitudes, state.n_qubits)


def apply_gates(state: Statevector, gates: Sequence[Gate]) -> Statevector:
    """Apply a gate sequence in order"""
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def _check_qubit(state: Statevector, qubit: int):
    if not 0 <= qubit < state.n_qubits:
        raise IndexError(f"Qubit {qubit} out of range for {state.n_qubits} qubits")


def expectation_z(state: Statevector, qubit: int) -> float:
    """<Z> on one qubit: P(bit = 0) - P(bit = 1)"""
    _check_qubit(state, qubit)
    bits = (np.arange(state.dim) >> qubit) & 1
    signs = 1 - 2 * bits
    return float(np.sum(state.probabilities() * signs))


def expectations_z(state: Statevector) -> np.ndarray:
    """<Z> on every qubit, qubit 0 first"""
    return np.array([expectation_z(state, q) for q in range(state.n_qubits)])


def fidelity(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2"""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(
            f"Cannot compare states on {a.n_qubits} and {b.n_qubits} qubits"
        )
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))


def states_equal(a: Statevector, b: Statevector, tol: float = 1e-10) -> bool:
    """True when the states agree up to a global phase"""
    if a.n_qubits != b.n_qubits:
        return False
    return abs(fidelity(a, b) - 1.0) < tol


def haar_random_state(n_qubits: int, rng: np.random.Generator) -> Statevector:
    """Draw a Haar-random pure state (normalized complex Gaussian vector)"""
    dim = 2 ** n_qubits
    amplitudes = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return Statevector(amplitudes / np.linalg.norm(amplitudes), n_qubits)


# --- Moettoenen state preparation -------------------------------------------

def _gray_code(i: int) -> int:
    return i ^ (i >> 1)


def _rotation_transform(k: int) -> np.ndarray:
    """Matrix taking the per-pattern angles alpha to the ladder angles theta"""
    n = 2 ** k
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            m[i, j] = (-1) ** bin(j & _gray_code(i)).count("1")
    return m / n


def _uniformly_controlled_ry(alphas: np.ndarray, controls: Sequence[int], target: int):
    """Gate ladder realizing sum_j |j><j| (x) RY(alpha_j)

    Bit p of the pattern j is the state of controls[p].
    """
    k = len(controls)
    thetas = _rotation_transform(k) @ alphas
    gates = []
    for i in range(2 ** k):
        gates.append(ry(target, thetas[i]))
        if k > 0:
            # CNOT on the control whose bit flips between consecutive Gray codes
            changed = _gray_code(i) ^ _gray_code((i + 1) % 2 ** k)
            gates.append(cnot(controls[changed.bit_length() - 1], target))
    return gates


def mottonen_gates(amplitudes: np.ndarray) -> list:
    """Gate sequence preparing a real (signed) amplitude vector from |0...0>"""
    vector = np.asarray(amplitudes, dtype=float)
    n_qubits = int(round(np.log2(len(vector)))) if len(vector) else 0
    if len(vector) < 2 or 2 ** n_qubits != len(vector):
        raise ContractViolation(f"Amplitude count must be a power of two >= 2, got {len(vector)}")

    gates = []
    # Split on the most significant qubit first; level k has k prepared controls
    for k in range(n_qubits):
        target = n_qubits - 1 - k
        controls = [n_qubits - k + p for p in range(k)]
        blocks = vector.reshape(2 ** k, 2, -1)
        if k < n_qubits - 1:
            lower = np.linalg.norm(blocks[:, 0, :], axis=1)
            upper = np.linalg.norm(blocks[:, 1, :], axis=1)
        else:
            # Last level carries the signs
            lower, upper = blocks[:, 0, 0], blocks[:, 1, 0]
        alphas = 2 * np.arctan2(upper, lower)
        gates.extend(_uniformly_controlled_ry(alphas, controls, target))
    return gates


def _check_amplitude_vector(amplitudes) -> np.ndarray:
    vector = np.asarray(amplitudes, dtype=float)
    if len(vector) < 2 or len(vector) & (len(vector) - 1):
        raise ContractViolation(f"Amplitude count must be a power of two >= 2, got {len(vector)}")
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise DegenerateInputError("Cannot prepare the zero vector")
    if abs(norm - 1.0) > 1e-9:
        raise ContractViolation(f"Amplitude vector must be normalized, got norm {norm:.12f}")
    return vector


def apply_mottonen(state: Statevector, amplitudes) -> Statevector:
    """Apply the Moettoenen preparation circuit for `amplitudes` to any state"""
    vector = _check_amplitude_vector(amplitudes)
    if len(vector) != state.dim:
        raise DimensionMismatchError(
            f"{len(vector)} amplitudes do not match a {state.n_qubits}-qubit state"
        )
    return apply_gates(state, mottonen_gates(vector))


def mottonen_prepare(amplitudes) -> Statevector:
    """Prepare a normalized real amplitude vector starting from |0...0>"""
    vector = _check_amplitude_vector(amplitudes)
    n_qubits = int(round(np.log2(len(vector))))
    return apply_mottonen(zero_state(n_qubits), vector)
