"""SGD training, prediction and evaluation for the intent classifiers."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from kasper.intent.classes import CLASS_INDEX, CLASSES, N_CLASSES, Prediction
from kasper.intent.nets import CnnModel, Model, RnnModel, predict_array
from kasper.intent.text import EmbeddingTable

logger = logging.getLogger(__name__)


class TrainingError(ValueError):
    pass


class MissingClassInTrain(TrainingError):
    pass


class NonFiniteLoss(TrainingError):
    pass


class EmptySplit(ValueError):
    pass


DEFAULT_LEARNING_RATE = {"cnn": 0.05, "rnn": 0.01}


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters; ``learning_rate=None`` picks the per-model default."""

    learning_rate: float | None = None
    epochs: int = 40
    seed: int = 42
    filters: int = 16
    hidden: int = 32

    def __post_init__(self):
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise TrainingError("learning rate must be positive")
        if self.filters <= 0 or self.hidden <= 0:
            raise TrainingError("filters and hidden size must be positive")
        if self.epochs < 0:
            raise TrainingError("epochs must be non-negative")

    def rate_for(self, kind: str) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return DEFAULT_LEARNING_RATE[kind]


def init_model(kind: str, dim: int, config: TrainConfig) -> Model:
    if kind == "cnn":
        return CnnModel.init(dim, config.filters, seed=config.seed)
    if kind == "rnn":
        return RnnModel.init(dim, config.hidden, seed=config.seed)
    raise TrainingError(f"unknown model kind {kind!r}")


def train_model(kind: str, train, table: EmbeddingTable, config: TrainConfig = TrainConfig(), *,
                require_all_classes: bool = True,
                on_epoch: Callable[[int, float], None] | None = None) -> Model:
    """Plain per-example SGD on cross-entropy with frozen embeddings.

    The visiting order of each epoch is drawn from ``config.seed``, so the
    result is bit-reproducible for fixed (seed, config, data).
    """
    train = list(train)
    if not train:
        raise TrainingError("empty training set")
    if require_all_classes:
        missing = sorted(set(CLASSES) - {ex.label for ex in train}, key=CLASS_INDEX.get)
        if missing:
            raise MissingClassInTrain(f"classes absent from training data: {missing}")

    model = init_model(kind, table.dim, config)
    xs = [table.embed_text(ex.text) for ex in train]
    ys = [CLASS_INDEX[ex.label] for ex in train]
    rng = np.random.default_rng(config.seed)
    lr = config.rate_for(kind)
    params = model.params

    for epoch in range(config.epochs):
        total = 0.0
        for i in rng.permutation(len(xs)):
            loss, grads = model.loss_and_grads(xs[i], ys[i])
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"loss became {loss} at epoch {epoch} (learning rate {lr})")
            total += loss
            for name, g in grads.items():
                params[name] -= lr * g
        if on_epoch is not None:
            on_epoch(epoch, total / len(xs))
        logger.debug("%s epoch %d mean loss %.4f", kind, epoch, total / len(xs))
    return model


def predict(model: Model, text: str, table: EmbeddingTable) -> Prediction:
    return predict_array(model, table.embed_text(text))


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    confusion: np.ndarray
    total: int

    @property
    def correct(self) -> int:
        return int(np.trace(self.confusion))


def evaluate(predict_fn: Callable[[str], Prediction | str], split) -> EvalResult:
    """Accuracy and confusion counts (rows: true class, columns: predicted)."""
    split = list(split)
    if not split:
        raise EmptySplit("cannot evaluate on an empty split")
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    for ex in split:
        out = predict_fn(ex.text)
        label = out.label if isinstance(out, Prediction) else out
        confusion[CLASS_INDEX[ex.label], CLASS_INDEX[label]] += 1
    return EvalResult(float(np.trace(confusion)) / len(split), confusion, len(split))
