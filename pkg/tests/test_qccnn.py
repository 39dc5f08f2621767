"""
Tests for the hybrid quantum-convolution classifier and its training loop
"""
import numpy as np
import pytest

from src.datasets import Dataset, make_synthetic_dataset
from src.encodings import CircuitSpec, EncodingKind, ParamVector
from src.errors import ConfigError, DimensionMismatchError, TrainingDivergedError
from src.qccnn import (
    HybridModel, MomentumSGD, TrainConfig, evaluate, forward, init_model, loss_and_gradients,
    predict, quantum_convolve, train,
)


def zero_head_model(spec, image_shape=(4, 4), n_classes=2, stride=2):
    out = ((image_shape[0] - 2) // stride + 1) * ((image_shape[1] - 2) // stride + 1)
    n_outputs = 1 if n_classes == 2 else n_classes
    return HybridModel(
        spec=spec,
        params=ParamVector.zeros(spec),
        head_weights=np.zeros((n_outputs, spec.n_qubits * out)),
        head_bias=np.zeros(n_outputs),
        image_shape=image_shape,
        n_classes=n_classes,
        stride=stride,
    )


def tiny_dataset(count=8, size=4, seed=0):
    train_set, _ = make_synthetic_dataset(n_train=count, n_val=2, size=size, seed=seed)
    return train_set


class TestConvolve:

    def test_trivial_window(self):
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X), image_shape=(2, 2))
        features = quantum_convolve(np.zeros((2, 2)), model)
        assert features.shape == (4, 1, 1)
        np.testing.assert_allclose(features.reshape(-1), np.ones(4), atol=1e-12)

    def test_output_shape_with_stride(self):
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X), image_shape=(5, 7), stride=1)
        assert quantum_convolve(np.zeros((5, 7)), model).shape == (4, 4, 6)
        assert model.n_features == 4 * 4 * 6

    def test_constant_image_gives_constant_channels(self, rng):
        spec = CircuitSpec(EncodingKind.HIGHER_ORDER)
        model = init_model(spec, (6, 6), seed=1)
        features = quantum_convolve(np.full((6, 6), 0.3), model)
        for channel in features:
            np.testing.assert_allclose(channel, channel[0, 0], atol=1e-12)

    def test_bounded(self, rng):
        model = init_model(CircuitSpec(EncodingKind.ANGLE_Y, layers=2), (4, 4), seed=2)
        features = quantum_convolve(rng.uniform(-1, 1, (4, 4)), model)
        assert np.all(np.abs(features) <= 1 + 1e-12)

    def test_windows_are_independent(self, rng):
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4), seed=3)
        image = rng.uniform(-1, 1, (4, 4))
        other = image.copy()
        other[2:, 2:] = rng.uniform(-1, 1, (2, 2))
        a = quantum_convolve(image, model)
        b = quantum_convolve(other, model)
        np.testing.assert_allclose(a[:, 0, :], b[:, 0, :])
        np.testing.assert_allclose(a[:, 1, 0], b[:, 1, 0])

    def test_amplitude_filter_has_two_channels(self):
        model = init_model(CircuitSpec(EncodingKind.AMPLITUDE), (4, 4))
        assert quantum_convolve(np.zeros((4, 4)), model).shape == (2, 2, 2)

    def test_image_too_small(self):
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X))
        with pytest.raises(DimensionMismatchError):
            quantum_convolve(np.zeros((1, 4)), model)


class TestForward:

    def test_binary_zero_head(self, rng):
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X))
        np.testing.assert_allclose(forward(model, rng.uniform(-1, 1, (4, 4))), [0.5, 0.5])

    def test_multiclass_zero_head(self, rng):
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X), n_classes=11)
        probs = forward(model, rng.uniform(-1, 1, (4, 4)))
        np.testing.assert_allclose(probs, np.full(11, 1 / 11))

    def test_multiclass_sums_to_one(self, rng):
        model = init_model(CircuitSpec(EncodingKind.HIGHER_ORDER), (4, 4), n_classes=5, seed=4)
        probs = forward(model, rng.uniform(-1, 1, (4, 4)))
        assert abs(probs.sum() - 1.0) < 1e-9
        assert np.all(np.isfinite(probs))

    def test_wrong_image_shape(self):
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X))
        with pytest.raises(DimensionMismatchError):
            forward(model, np.zeros((6, 6)))

    def test_head_shape_checked(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X)
        with pytest.raises(DimensionMismatchError):
            HybridModel(spec, ParamVector.zeros(spec), np.zeros((1, 5)), np.zeros(1), (4, 4))

    def test_filter_needs_four_features(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X, n_features=3)
        with pytest.raises(ConfigError):
            HybridModel(spec, ParamVector.zeros(spec), np.zeros((1, 12)), np.zeros(1), (4, 4))

    def test_init_ranges(self):
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X, layers=2), (8, 8), seed=5)
        bound = 1 / np.sqrt(model.n_features)
        assert np.all(np.abs(model.head_weights) <= bound)
        assert np.all((model.params.values >= 0) & (model.params.values < 2 * np.pi))

    def test_predict(self, rng):
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X), n_classes=3)
        model.head_bias[:] = [0.0, 2.0, 0.0]
        np.testing.assert_array_equal(predict(model, rng.uniform(-1, 1, (3, 4, 4))), [1, 1, 1])


class TestGradients:

    @pytest.mark.parametrize("kind,n_classes", [
        (EncodingKind.ANGLE_X, 2),
        (EncodingKind.HIGHER_ORDER, 2),
        (EncodingKind.ANGLE_Y, 3),
        (EncodingKind.AMPLITUDE, 2),
    ])
    def test_end_to_end_against_finite_differences(self, rng, kind, n_classes):
        spec = CircuitSpec(kind, layers=2)
        model = init_model(spec, (4, 4), n_classes=n_classes, seed=6)
        images = rng.uniform(-1, 1, (2, 4, 4))
        labels = [0, n_classes - 1]
        _, grads = loss_and_gradients(model, images, labels)

        h = 1e-5
        for i in range(len(model.params)):
            plus, minus = model.copy(), model.copy()
            plus.params.values[i] += h
            minus.params.values[i] -= h
            fd = (loss_and_gradients(plus, images, labels)[0]
                  - loss_and_gradients(minus, images, labels)[0]) / (2 * h)
            assert abs(grads.params[i] - fd) <= 1e-4 * max(1.0, abs(fd))

    def test_head_gradients(self, rng):
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4), seed=7)
        images = rng.uniform(-1, 1, (3, 4, 4))
        labels = [0, 1, 1]
        _, grads = loss_and_gradients(model, images, labels)
        h = 1e-6
        plus, minus = model.copy(), model.copy()
        plus.head_weights[0, 5] += h
        minus.head_weights[0, 5] -= h
        fd = (loss_and_gradients(plus, images, labels)[0]
              - loss_and_gradients(minus, images, labels)[0]) / (2 * h)
        assert grads.head_weights[0, 5] == pytest.approx(fd, rel=1e-5, abs=1e-8)

    def test_batch_composition_does_not_leak(self, rng):
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4), seed=8)
        images = rng.uniform(-1, 1, (3, 4, 4))
        alone = quantum_convolve(images[0], model)
        loss_and_gradients(model, images, [0, 1, 0])
        np.testing.assert_array_equal(quantum_convolve(images[0], model), alone)

    def test_tiny_step_decreases_loss(self, rng):
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4), seed=9)
        images = rng.uniform(-1, 1, (4, 4, 4))
        labels = [0, 1, 0, 1]
        before, grads = loss_and_gradients(model, images, labels)
        if grads.norm() < 1e-10:
            pytest.skip("gradient vanished")
        MomentumSGD(learning_rate=1e-6, momentum=0.9).step(model, grads)
        after, _ = loss_and_gradients(model, images, labels)
        assert after < before


class TestTrainConfig:

    @pytest.mark.parametrize("kwargs", [{"epochs": 0}, {"learning_rate": -0.1},
                                        {"batch_size": 0}, {"optimizer": "adam"},
                                        {"seeds": ()}, {"momentum": 1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            TrainConfig(**kwargs)

    def test_defaults(self):
        config = TrainConfig()
        assert config.epochs == 20
        assert config.seeds == (0, 1, 2)
        assert config.scaling == pytest.approx(np.pi / 4)


class TestTrain:

    def test_zero_learning_rate(self):
        data = tiny_dataset()
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4), seed=0)
        params = model.params.values.copy()
        weights = model.head_weights.copy()
        log = train(model, data, TrainConfig(epochs=3, learning_rate=0.0, batch_size=4))
        np.testing.assert_array_equal(model.params.values, params)
        np.testing.assert_array_equal(model.head_weights, weights)
        losses = [r.train_loss for r in log.records]
        assert losses[0] == losses[1] == losses[2]

    def test_same_seed_same_log(self):
        data = tiny_dataset()
        config = TrainConfig(epochs=2, learning_rate=0.05, batch_size=3)
        logs = []
        for _ in range(2):
            model = init_model(CircuitSpec(EncodingKind.ANGLE_Y), (4, 4), seed=1)
            logs.append(train(model, data, config, seed=1))
        assert logs[0].digest() == logs[1].digest()
        assert [r.val_loss for r in logs[0].records] == [r.val_loss for r in logs[1].records]

    def test_threads_give_same_log(self):
        data = tiny_dataset()
        logs = []
        for jobs in (1, 3):
            model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4), seed=2)
            config = TrainConfig(epochs=1, learning_rate=0.05, batch_size=4, jobs=jobs)
            logs.append(train(model, data, config, seed=2))
        assert logs[0].digest() == logs[1].digest()

    def test_divergence_reports_epoch(self):
        data = tiny_dataset()
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4), seed=0)
        model.head_bias[:] = np.nan
        with pytest.raises(TrainingDivergedError) as err:
            train(model, data, TrainConfig(epochs=2))
        assert err.value.epoch == 1

    def test_missing_class(self):
        data = Dataset(np.zeros((4, 4, 4)), [0, 0, 0, 0], "train", 2)
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4))
        with pytest.raises(ConfigError):
            train(model, data, TrainConfig(epochs=1))

    def test_log_csv(self, tmp_path):
        data = tiny_dataset()
        model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (4, 4))
        log = train(model, data, TrainConfig(epochs=2, batch_size=4))
        path = tmp_path / "log.csv"
        log.write_csv(str(path), header=["qccnn-lab test"])
        lines = path.read_text().splitlines()
        assert lines[0] == "# qccnn-lab test"
        assert lines[1].startswith("epoch,train_loss")
        assert len(lines) == 4
        assert 1 <= log.best_epoch <= 2

    def test_evaluate(self):
        data = tiny_dataset()
        model = zero_head_model(CircuitSpec(EncodingKind.ANGLE_X))
        loss, accuracy = evaluate(model, data)
        assert loss == pytest.approx(np.log(2))
        assert 0.0 <= accuracy <= 1.0


@pytest.mark.slow
def test_learns_stripes_vs_checkers():
    train_set, val_set = make_synthetic_dataset(n_train=200, n_val=50, size=8, seed=0)
    model = init_model(CircuitSpec(EncodingKind.ANGLE_X), (8, 8), seed=0)
    log = train(model, train_set, TrainConfig(epochs=30), val=val_set, seed=0)
    assert log.best_train_accuracy >= 0.95
