"""
Tests for parameter-shift gradients against finite differences
"""
import numpy as np
import pytest

from src.encodings import CircuitSpec, EncodingKind, ParamVector, execute
from src.gradients import finite_difference_jacobian, parameter_shift_jacobian
from src.qccnn import quantum_gradient


def test_cosine_extremum():
    spec = CircuitSpec(EncodingKind.ANGLE_Y, n_features=1)
    grad = quantum_gradient(spec, [0.0], [0.0])
    assert grad.shape == (1, 1)
    assert grad[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_cosine_slope():
    spec = CircuitSpec(EncodingKind.ANGLE_Y, n_features=1)
    grad = quantum_gradient(spec, [0.0], [np.pi / 2])
    assert grad[0, 0] == pytest.approx(-1.0, abs=1e-12)
    fd = finite_difference_jacobian(lambda v: execute(spec, [0.0], v), [np.pi / 2])
    assert fd[0, 0] == pytest.approx(-1.0, abs=1e-8)


def test_shape_matches_params():
    spec = CircuitSpec(EncodingKind.HIGHER_ORDER, layers=3)
    grad = quantum_gradient(spec, np.zeros(4), ParamVector.zeros(spec))
    assert grad.shape == (4, 12)


def test_generic_function():
    # sin is exactly differentiated by a pi/2 shift
    values = np.array([0.3, 1.4])
    jac = parameter_shift_jacobian(lambda v: np.sin(v), values)
    np.testing.assert_allclose(jac, np.diag(np.cos(values)), atol=1e-12)


def test_agrees_with_finite_differences():
    rng = np.random.default_rng(7)
    kinds = [EncodingKind.ANGLE_X, EncodingKind.ANGLE_Y, EncodingKind.HIGHER_ORDER]
    for trial in range(100):
        kind = kinds[trial % 3]
        layers = 1 if trial % 2 == 0 else 3
        spec = CircuitSpec(kind, layers=layers)
        x = rng.uniform(-1, 1, 4)
        theta = rng.uniform(0, 2 * np.pi, spec.n_params)

        shift = quantum_gradient(spec, x, theta)
        fd = finite_difference_jacobian(lambda v: execute(spec, x, v), theta)
        scale = max(1.0, np.max(np.abs(fd)))
        assert np.max(np.abs(shift - fd)) / scale < 1e-5
