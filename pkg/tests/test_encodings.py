"""
Tests for encoding blocks, the entangling ansatz and the reuploading circuit
"""
import numpy as np
import pytest

from src.encodings import (
    DEFAULT_SCALING, CircuitSpec, EncodingKind, ParamVector, amplitude_vector, ansatz_gates,
    born_probabilities, encoding_gates, execute, final_state,
)
from src.errors import ConfigError, DimensionMismatchError
from src.statevector import mottonen_prepare, states_equal


FOUR_QUBIT = [EncodingKind.ANGLE_X, EncodingKind.ANGLE_Y, EncodingKind.HIGHER_ORDER]


class TestCircuitSpec:

    @pytest.mark.parametrize("name,kind", [
        ("angle_x", EncodingKind.ANGLE_X),
        ("AngleY", EncodingKind.ANGLE_Y),
        ("higher-order", EncodingKind.HIGHER_ORDER),
        ("amplitude", EncodingKind.AMPLITUDE),
    ])
    def test_parse(self, name, kind):
        assert EncodingKind.parse(name) is kind

    def test_unknown_encoding(self):
        with pytest.raises(ConfigError):
            EncodingKind.parse("basis")

    def test_string_encoding_accepted(self):
        spec = CircuitSpec("angle_x", layers=2)
        assert spec.encoding is EncodingKind.ANGLE_X
        assert spec.n_params == 8

    def test_amplitude_uses_log_qubits(self):
        spec = CircuitSpec(EncodingKind.AMPLITUDE, n_features=4, layers=3)
        assert spec.n_qubits == 2
        assert spec.n_params == 6

    @pytest.mark.parametrize("kwargs", [
        {"layers": 0},
        {"scaling": 0.0},
        {"scaling": -1.0},
        {"n_features": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            CircuitSpec(EncodingKind.ANGLE_X, **kwargs)

    def test_amplitude_needs_power_of_two(self):
        with pytest.raises(ConfigError):
            CircuitSpec(EncodingKind.AMPLITUDE, n_features=3)

    def test_default_scaling(self):
        assert CircuitSpec(EncodingKind.ANGLE_Y).scaling == pytest.approx(np.pi / 4)
        assert DEFAULT_SCALING == pytest.approx(np.pi / 4)


class TestParamVector:

    def test_layout(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X, layers=2)
        params = ParamVector.for_spec(spec, np.arange(8.0))
        np.testing.assert_array_equal(params.layer(1), [4, 5, 6, 7])

    def test_wrong_length(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X, layers=2)
        with pytest.raises(DimensionMismatchError):
            ParamVector.for_spec(spec, np.zeros(7))

    def test_random_range(self, rng):
        params = ParamVector.random(CircuitSpec(EncodingKind.ANGLE_X, layers=5), rng)
        assert np.all(params.values >= 0) and np.all(params.values < 2 * np.pi)

    def test_shifted_copies(self):
        params = ParamVector.zeros(CircuitSpec(EncodingKind.ANGLE_X))
        shifted = params.shifted(2, 0.5)
        assert shifted.values[2] == 0.5
        assert params.values[2] == 0.0


class TestGates:

    def test_angle_x_gates(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X, scaling=0.5)
        gates = encoding_gates(spec, [1.0, 2.0, 3.0, 4.0])
        assert [g.kind for g in gates] == ["RX"] * 4
        assert [g.angle for g in gates] == [0.5, 1.0, 1.5, 2.0]

    def test_higher_order_gates(self):
        spec = CircuitSpec(EncodingKind.HIGHER_ORDER, scaling=2.0)
        gates = encoding_gates(spec, [0.5, 1.0, -1.0, 0.25])
        kinds = [g.kind for g in gates]
        assert kinds == ["H"] * 4 + ["RZ"] * 4 + ["RZZ"] * 6
        pairs = [g.targets for g in gates if g.kind == "RZZ"]
        assert pairs == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        # f * x_i * x_j
        assert gates[8].angle == pytest.approx(2.0 * 0.5 * 1.0)

    def test_ring_ansatz(self):
        gates = ansatz_gates(np.zeros(4), 4)
        cnots = [g.targets for g in gates if g.kind == "CNOT"]
        assert cnots == [(0, 1), (1, 2), (2, 3), (3, 0)]

    def test_two_qubit_ansatz_single_cnot(self):
        cnots = [g.targets for g in ansatz_gates(np.zeros(2), 2) if g.kind == "CNOT"]
        assert cnots == [(0, 1)]

    def test_non_entangling_ansatz(self):
        assert all(g.kind == "RX" for g in ansatz_gates(np.zeros(4), 4, entangling=False))


class TestExecute:

    def test_zero_input_zero_params(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X)
        np.testing.assert_allclose(execute(spec, np.zeros(4), np.zeros(4)), np.ones(4), atol=1e-12)

    def test_outputs_bounded(self, rng):
        for kind in FOUR_QUBIT:
            spec = CircuitSpec(kind, layers=3)
            out = execute(spec, rng.uniform(-1, 1, 4), ParamVector.random(spec, rng))
            assert out.shape == (4,)
            assert np.all(np.abs(out) <= 1 + 1e-12)

    def test_single_qubit_angle_y(self):
        # RY(f x) then RX(theta): <Z> = cos(f x) cos(theta)
        spec = CircuitSpec(EncodingKind.ANGLE_Y, n_features=1, scaling=1.0)
        for x, theta in [(0.3, 0.0), (0.0, 1.2), (-0.7, 2.5)]:
            out = execute(spec, [x], [theta])
            assert out[0] == pytest.approx(np.cos(x) * np.cos(theta), abs=1e-12)

    @pytest.mark.parametrize("kind", [EncodingKind.ANGLE_X, EncodingKind.ANGLE_Y,
                                      EncodingKind.AMPLITUDE])
    def test_scaling_equivariance(self, rng, kind):
        f = 1.7
        x = rng.uniform(-1, 1, 4)
        scaled = CircuitSpec(kind, scaling=f, layers=2)
        unit = CircuitSpec(kind, scaling=1.0, layers=2)
        params = ParamVector.random(scaled, rng)
        np.testing.assert_allclose(execute(scaled, x, params), execute(unit, f * x, params),
                                   atol=1e-10)

    def test_feature_count_checked(self):
        with pytest.raises(DimensionMismatchError):
            execute(CircuitSpec(EncodingKind.ANGLE_X), np.zeros(3), np.zeros(4))

    def test_param_count_checked(self):
        with pytest.raises(DimensionMismatchError):
            execute(CircuitSpec(EncodingKind.ANGLE_X, layers=2), np.zeros(4), np.zeros(4))

    def test_probabilities_sum_to_one(self, rng):
        spec = CircuitSpec(EncodingKind.HIGHER_ORDER, layers=2)
        probs = born_probabilities(spec, rng.uniform(-1, 1, 4), ParamVector.random(spec, rng))
        assert probs.sum() == pytest.approx(1.0)


class TestAmplitudeEncoding:

    def test_normalized(self):
        spec = CircuitSpec(EncodingKind.AMPLITUDE)
        np.testing.assert_allclose(amplitude_vector(spec, [3.0, 0.0, 4.0, 0.0]), [0.6, 0, 0.8, 0])

    def test_zero_window_is_uniform(self):
        spec = CircuitSpec(EncodingKind.AMPLITUDE)
        np.testing.assert_allclose(amplitude_vector(spec, np.zeros(4)), np.full(4, 0.5))

    def test_first_layer_prepares_amplitudes(self):
        spec = CircuitSpec(EncodingKind.AMPLITUDE, entangling=False)
        x = np.array([0.2, -0.4, 0.1, 0.8])
        state = final_state(spec, x, np.zeros(2))
        assert states_equal(state, mottonen_prepare(x / np.linalg.norm(x)))

    def test_reupload_acts_on_current_state(self, rng):
        x = np.array([0.2, -0.4, 0.1, 0.8])
        one = CircuitSpec(EncodingKind.AMPLITUDE, layers=1)
        two = CircuitSpec(EncodingKind.AMPLITUDE, layers=2)
        theta = rng.uniform(0, 2 * np.pi, 2)
        single = final_state(one, x, theta)
        double = final_state(two, x, np.concatenate([theta, theta]))
        assert not states_equal(single, double)
