#!/usr/bin/env python3
"""
QCCNN - Hybrid classifier: one 2x2 quantum convolution filter whose per-qubit
<Z> outputs form feature channels, followed by a dense classical head

Training is mini-batch gradient descent with momentum. Quantum parameter
gradients come from the parameter-shift rule, chained with a hand-written
backward pass through the head.
"""
import csv
import hashlib
import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, log_softmax, softmax

from src.datasets import Dataset
from src.encodings import DEFAULT_SCALING, CircuitSpec, ParamVector, execute
from src.errors import ConfigError, DimensionMismatchError, TrainingDivergedError
from src.gradients import parameter_shift_jacobian
from src.metrics import draw_rng
from src.pool import TaskPool

logger = logging.getLogger(__name__)

FILTER_SIZE = 2
DEFAULT_STRIDE = 2
DEFAULT_EPOCHS = 20
DEFAULT_LEARNING_RATE = 0.01
DEFAULT_BATCH_SIZE = 16
DEFAULT_MOMENTUM = 0.9

OPTIMIZERS = ("momentum", "sgd")

STREAM_INIT = 6
STREAM_SHUFFLE = 7


def output_size(size: int, stride: int) -> int:
    """Number of filter positions along one image axis"""
    return (size - FILTER_SIZE) // stride + 1


@dataclass
class HybridModel:
    """Quantum filter plus dense head

    Binary tasks use one sigmoid output unit, multiclass tasks one softmax
    unit per class.
    """
    spec: CircuitSpec
    params: ParamVector
    head_weights: np.ndarray
    head_bias: np.ndarray
    image_shape: Tuple[int, int]
    n_classes: int = 2
    stride: int = DEFAULT_STRIDE

    def __post_init__(self):
        if self.spec.n_features != FILTER_SIZE * FILTER_SIZE:
            raise ConfigError(
                f"A {FILTER_SIZE}x{FILTER_SIZE} filter feeds {FILTER_SIZE ** 2} features, "
                f"spec has {self.spec.n_features}",
                field="n_features",
            )
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}", field="stride")
        if self.n_classes < 2:
            raise ConfigError(f"n_classes must be >= 2, got {self.n_classes}", field="n_classes")
        height, width = self.image_shape
        if height < FILTER_SIZE or width < FILTER_SIZE:
            raise DimensionMismatchError(f"Images of {height}x{width} are smaller than the filter")

        self.head_weights = np.asarray(self.head_weights, dtype=float)
        self.head_bias = np.asarray(self.head_bias, dtype=float).reshape(-1)
        expected = (self.n_outputs, self.n_features)
        if self.head_weights.shape != expected:
            raise DimensionMismatchError(
                f"Head weights shaped {self.head_weights.shape}, expected {expected}"
            )
        if self.head_bias.shape != (self.n_outputs,):
            raise DimensionMismatchError(
                f"Head bias has {self.head_bias.size} entries, expected {self.n_outputs}"
            )

    @property
    def binary(self) -> bool:
        return self.n_classes == 2

    @property
    def n_outputs(self) -> int:
        return 1 if self.binary else self.n_classes

    @property
    def output_shape(self) -> Tuple[int, int]:
        height, width = self.image_shape
        return output_size(height, self.stride), output_size(width, self.stride)

    @property
    def n_windows(self) -> int:
        out_h, out_w = self.output_shape
        return out_h * out_w

    @property
    def n_features(self) -> int:
        """Flattened feature count n_qubits * out_h * out_w"""
        return self.spec.n_qubits * self.n_windows

    def copy(self) -> "HybridModel":
        return HybridModel(
            spec=self.spec,
            params=ParamVector(self.params.values.copy(), self.params.layers, self.params.n_qubits),
            head_weights=self.head_weights.copy(),
            head_bias=self.head_bias.copy(),
            image_shape=self.image_shape,
            n_classes=self.n_classes,
            stride=self.stride,
        )


@dataclass
class ModelGradients:
    """Loss gradients, shaped like the model's trainable arrays"""
    params: np.ndarray
    head_weights: np.ndarray
    head_bias: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(sum(np.sum(g ** 2) for g in (self.params, self.head_weights,
                                                          self.head_bias))))


def init_model(spec: CircuitSpec, image_shape: Tuple[int, int], n_classes: int = 2,
               stride: int = DEFAULT_STRIDE, seed: int = 0) -> HybridModel:
    """
    Fresh model: head uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], angles uniform in [0, 2pi)

    Args:
        spec: Quantum filter circuit (4 features)
        image_shape: (height, width) of the input images
        n_classes: 2 for the binary task
        stride: Filter stride
        seed: Initialization seed
    """
    height, width = image_shape
    if height < FILTER_SIZE or width < FILTER_SIZE:
        raise DimensionMismatchError(f"Images of {height}x{width} are smaller than the filter")
    rng = draw_rng(seed, STREAM_INIT, 0)
    n_outputs = 1 if n_classes == 2 else n_classes
    fan_in = spec.n_qubits * output_size(height, stride) * output_size(width, stride)
    bound = 1.0 / np.sqrt(fan_in)
    return HybridModel(
        spec=spec,
        params=ParamVector.random(spec, rng),
        head_weights=rng.uniform(-bound, bound, (n_outputs, fan_in)),
        head_bias=rng.uniform(-bound, bound, n_outputs),
        image_shape=(height, width),
        n_classes=n_classes,
        stride=stride,
    )


def _check_image(image, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2-D grayscale image, got shape {image.shape}")
    if image.shape[0] < FILTER_SIZE or image.shape[1] < FILTER_SIZE:
        raise DimensionMismatchError(
            f"Image of {image.shape[0]}x{image.shape[1]} is smaller than the "
            f"{FILTER_SIZE}x{FILTER_SIZE} filter"
        )
    if shape is not None and image.shape != tuple(shape):
        raise DimensionMismatchError(
            f"Model expects {shape[0]}x{shape[1]} images, got {image.shape[0]}x{image.shape[1]}"
        )
    return image


def windows(image, stride: int) -> List[np.ndarray]:
    """Flattened (row-major) 2x2 patches, visited row-major"""
    image = np.asarray(image, dtype=float)
    out_h = output_size(image.shape[0], stride)
    out_w = output_size(image.shape[1], stride)
    patches = []
    for r in range(out_h):
        for c in range(out_w):
            top, left = r * stride, c * stride
            patches.append(image[top:top + FILTER_SIZE, left:left + FILTER_SIZE].reshape(-1))
    return patches


def quantum_convolve(image, model: HybridModel) -> np.ndarray:
    """Feature tensor shaped (n_qubits, out_h, out_w) of per-qubit <Z> per window"""
    image = _check_image(image)
    out_h = output_size(image.shape[0], model.stride)
    out_w = output_size(image.shape[1], model.stride)
    outputs = [execute(model.spec, patch, model.params) for patch in windows(image, model.stride)]
    return np.stack(outputs, axis=1).reshape(model.spec.n_qubits, out_h, out_w)


def quantum_gradient(spec: CircuitSpec, x, params) -> np.ndarray:
    """Parameter-shift Jacobian of the per-qubit <Z>, shaped (n_qubits, n_params)"""
    if isinstance(params, ParamVector):
        params = params.values
    return parameter_shift_jacobian(lambda values: execute(spec, x, values), params)


def _logits(model: HybridModel, features: np.ndarray) -> np.ndarray:
    return model.head_weights @ features + model.head_bias


def _probabilities(model: HybridModel, logits: np.ndarray) -> np.ndarray:
    if model.binary:
        p = expit(logits[0])
        return np.array([1.0 - p, p])
    return softmax(logits)


def _sample_loss(model: HybridModel, logits: np.ndarray, label: int) -> float:
    if model.binary:
        # Binary cross-entropy from the logit: log(1 + e^z) - y z
        return float(np.logaddexp(0.0, logits[0]) - label * logits[0])
    return float(-log_softmax(logits)[label])


def forward(model: HybridModel, image) -> np.ndarray:
    """Class probability vector; the binary task returns [1 - p, p]"""
    image = _check_image(image, model.image_shape)
    features = quantum_convolve(image, model).reshape(-1)
    return _probabilities(model, _logits(model, features))


def predict(model: HybridModel, images) -> np.ndarray:
    return np.array([int(np.argmax(forward(model, image))) for image in images])


def _sample_backward(model: HybridModel, image, label: int):
    """Loss and gradients of one sample"""
    image = _check_image(image, model.image_shape)
    patches = windows(image, model.stride)
    outputs = []
    jacobians = []
    for patch in patches:
        outputs.append(execute(model.spec, patch, model.params))
        jacobians.append(quantum_gradient(model.spec, patch, model.params))
    # Channel-major flattening: index = qubit * n_windows + window
    features = np.stack(outputs, axis=1).reshape(-1)
    logits = _logits(model, features)
    loss = _sample_loss(model, logits, label)

    if model.binary:
        dz = np.array([expit(logits[0]) - label])
    else:
        dz = softmax(logits)
        dz[label] -= 1.0

    d_features = (model.head_weights.T @ dz).reshape(model.spec.n_qubits, len(patches))
    d_params = np.zeros(len(model.params))
    for w, jacobian in enumerate(jacobians):
        d_params += jacobian.T @ d_features[:, w]

    grads = ModelGradients(
        params=d_params,
        head_weights=np.outer(dz, features),
        head_bias=dz,
    )
    return loss, grads


def loss_and_gradients(model: HybridModel, images, labels,
                       jobs: int = 1) -> Tuple[float, ModelGradients]:
    """
    Mean cross-entropy over a batch and its gradients

    Per-sample passes are independent and may run on `jobs` threads; the
    model is read-only while they run.
    """
    labels = [int(label) for label in labels]
    if len(images) != len(labels) or not labels:
        raise DimensionMismatchError(f"{len(images)} images and {len(labels)} labels in batch")

    pool = TaskPool(jobs)
    results = pool.run(lambda i: _sample_backward(model, images[i], labels[i]), range(len(labels)))

    n = len(results)
    loss = sum(r[0] for r in results) / n
    grads = ModelGradients(
        params=sum(r[1].params for r in results) / n,
        head_weights=sum(r[1].head_weights for r in results) / n,
        head_bias=sum(r[1].head_bias for r in results) / n,
    )
    return loss, grads


def evaluate(model: HybridModel, dataset: Dataset, jobs: int = 1) -> Tuple[float, float]:
    """(mean loss, accuracy) over a dataset"""
    def one(i):
        image = _check_image(dataset.images[i], model.image_shape)
        features = quantum_convolve(image, model).reshape(-1)
        logits = _logits(model, features)
        label = int(dataset.labels[i])
        hit = int(np.argmax(_probabilities(model, logits))) == label
        return _sample_loss(model, logits, label), hit

    results = TaskPool(jobs).run(one, range(len(dataset)))
    losses = [loss for loss, _ in results]
    correct = sum(hit for _, hit in results)
    return float(np.mean(losses)), correct / len(dataset)


class MomentumSGD:
    """Heavy-ball gradient descent: v <- mu v - lr g; w <- w + v"""

    def __init__(self, learning_rate: float = DEFAULT_LEARNING_RATE,
                 momentum: float = DEFAULT_MOMENTUM):
        self.learning_rate = learning_rate
        self.momentum = momentum
        self._velocity = None

    def step(self, model: HybridModel, grads: ModelGradients):
        """Update the model in place"""
        if self._velocity is None:
            self._velocity = [np.zeros_like(grads.params), np.zeros_like(grads.head_weights),
                              np.zeros_like(grads.head_bias)]
        arrays = [model.params.values, model.head_weights, model.head_bias]
        for velocity, array, grad in zip(self._velocity, arrays,
                                         (grads.params, grads.head_weights, grads.head_bias)):
            velocity *= self.momentum
            velocity -= self.learning_rate * grad
            array += velocity


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters"""
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    batch_size: int = DEFAULT_BATCH_SIZE
    optimizer: str = "momentum"
    seeds: Tuple[int, ...] = (0, 1, 2)
    scaling: float = DEFAULT_SCALING
    momentum: float = DEFAULT_MOMENTUM
    stride: int = DEFAULT_STRIDE
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}", field="epochs")
        if self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}",
                              field="learning_rate")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}", field="batch_size")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {', '.join(OPTIMIZERS)}, "
                              f"got '{self.optimizer}'", field="optimizer")
        if not self.seeds:
            raise ConfigError("At least one seed is required", field="seeds")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}", field="momentum")
        if not self.scaling > 0:
            raise ConfigError(f"scaling must be > 0, got {self.scaling}", field="scaling")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}", field="stride")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}", field="jobs")

    def make_optimizer(self) -> MomentumSGD:
        momentum = self.momentum if self.optimizer == "momentum" else 0.0
        return MomentumSGD(self.learning_rate, momentum)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_loss: float
    val_accuracy: float
    wall_time: float

    def to_row(self) -> list:
        return [self.epoch, repr(self.train_loss), repr(self.train_accuracy),
                repr(self.val_loss), repr(self.val_accuracy), f"{self.wall_time:.3f}"]


@dataclass
class TrainLog:
    """Per-epoch metrics of one training session"""
    label: str
    seed: int
    records: List[EpochRecord] = field(default_factory=list)

    COLUMNS = ["epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy", "wall_time"]

    @property
    def best_epoch(self) -> int:
        """Epoch with the highest validation accuracy (earliest on ties)"""
        if not self.records:
            return 0
        best = max(self.records, key=lambda r: (r.val_accuracy, r.train_accuracy, -r.epoch))
        return best.epoch

    @property
    def best_train_accuracy(self) -> float:
        return max((r.train_accuracy for r in self.records), default=0.0)

    @property
    def best_val_accuracy(self) -> float:
        return max((r.val_accuracy for r in self.records), default=0.0)

    def digest(self) -> str:
        """sha256 over every recorded metric except wall time"""
        h = hashlib.sha256(f"{self.label}|{self.seed}".encode())
        for r in self.records:
            values = (r.epoch, r.train_loss, r.train_accuracy, r.val_loss, r.val_accuracy)
            h.update("|".join(repr(v) for v in values).encode())
        return h.hexdigest()

    def write_csv(self, path: str, header: Sequence[str] = ()):
        with open(path, "w", newline="") as f:
            for line in header:
                f.write(f"# {line}\n")
            writer = csv.writer(f)
            writer.writerow(self.COLUMNS)
            for record in self.records:
                writer.writerow(record.to_row())


def _check_training_set(model: HybridModel, dataset: Dataset):
    if len(dataset) == 0:
        raise ConfigError("Training split is empty", field="dataset")
    if tuple(dataset.image_shape) != tuple(model.image_shape):
        raise DimensionMismatchError(
            f"Dataset images are {dataset.image_shape}, model expects {model.image_shape}"
        )
    present = set(int(label) for label in dataset.labels)
    missing = [c for c in range(model.n_classes) if c not in present]
    if missing:
        raise ConfigError(f"Training split has no samples of class(es) {missing}", field="dataset")


def train(model: HybridModel, dataset: Dataset, config: TrainConfig,
          val: Optional[Dataset] = None, seed: int = 0, verbose: bool = False) -> TrainLog:
    """
    Train the model in place and return its log

    Args:
        model: Model to update
        dataset: Training split
        config: Hyperparameters
        val: Validation split; the training split is reused when omitted
        seed: Seeds the per-epoch shuffles
        verbose: Print one line per epoch

    Raises:
        TrainingDivergedError: A non-finite loss occurred
    """
    _check_training_set(model, dataset)
    val = val if val is not None else dataset
    optimizer = config.make_optimizer()
    log = TrainLog(label=model.spec.label(), seed=seed)

    for epoch in range(1, config.epochs + 1):
        start = time.time()
        order = draw_rng(seed, STREAM_SHUFFLE, epoch).permutation(len(dataset))
        for begin in range(0, len(order), config.batch_size):
            batch = order[begin:begin + config.batch_size]
            loss, grads = loss_and_gradients(model, dataset.images[batch], dataset.labels[batch],
                                             jobs=config.jobs)
            if not np.isfinite(loss):
                logger.error("Training diverged in epoch %d (loss %s)", epoch, loss)
                raise TrainingDivergedError(epoch, loss)
            optimizer.step(model, grads)

        train_loss, train_acc = evaluate(model, dataset, jobs=config.jobs)
        val_loss, val_acc = evaluate(model, val, jobs=config.jobs)
        if not np.isfinite(train_loss):
            logger.error("Training diverged in epoch %d (loss %s)", epoch, train_loss)
            raise TrainingDivergedError(epoch, train_loss)
        record = EpochRecord(epoch, train_loss, train_acc, val_loss, val_acc, time.time() - start)
        log.records.append(record)

        if verbose:
            print(f"  epoch {epoch:>3}: train loss {train_loss:.4f} acc {train_acc:.3f} | "
                  f"val loss {val_loss:.4f} acc {val_acc:.3f} ({record.wall_time:.1f}s)")

    logger.info("%s seed %d: best train %.3f, best val %.3f (epoch %d)", log.label, seed,
                log.best_train_accuracy, log.best_val_accuracy, log.best_epoch)
    return log
