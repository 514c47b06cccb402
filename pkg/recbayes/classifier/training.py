"""Mini-batch training of the recurrent classifier."""

from __future__ import annotations

import csv
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from tqdm import tqdm

from recbayes.classifier.model import Batch, batch_loss, filter_batch
from recbayes.classifier.params import ClassifierParams
from recbayes.errors import ConfigError, NonFiniteLossError
from recbayes.rng import Purpose, stream
from recbayes.trajectories.dataset import Example, LabelledDataset

METRICS_HEADER = ["epoch", "train_loss", "val_loss", "val_final_acc"]
OPTIMIZERS = ("adam", "sgd")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 1e-3
    batch_size: int = 32
    seed: int = 0
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float | None = 5.0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"Need at least one epoch, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"Batch size must be positive, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ConfigError(f"Learning rate must be positive, got {self.learning_rate}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"Unknown optimizer '{self.optimizer}', expected one of {OPTIMIZERS}")


class GradientDescent:
    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate
        self.steps = 0

    def step(self, params: ClassifierParams, grads: dict[str, np.ndarray]) -> None:
        self.steps += 1
        for name, g in grads.items():
            params.weights[name] -= self.learning_rate * g


class Adam:
    def __init__(self, params: ClassifierParams, learning_rate: float, beta1: float, beta2: float, eps: float):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = params.zeros_like()
        self.v = params.zeros_like()
        self.steps = 0

    def step(self, params: ClassifierParams, grads: dict[str, np.ndarray]) -> None:
        self.steps += 1
        correction1 = 1.0 - self.beta1**self.steps
        correction2 = 1.0 - self.beta2**self.steps
        for name, g in grads.items():
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            m_hat = self.m[name] / correction1
            v_hat = self.v[name] / correction2
            params.weights[name] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(params: ClassifierParams, config: TrainConfig):
    if config.optimizer == "sgd":
        return GradientDescent(config.learning_rate)
    return Adam(params, config.learning_rate, config.beta1, config.beta2, config.eps)


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float | None) -> float:
    """Scale gradients in place to global L2 norm at most `max_norm`. Returns the norm before clipping."""
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if max_norm is not None and norm > max_norm:
        for g in grads.values():
            g *= max_norm / norm
    return norm


def iterate_minibatches(n: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def evaluate(params: ClassifierParams, examples: Sequence[Example], batch_size: int = 64) -> tuple[float, float]:
    """Mean loss and final-step accuracy over `examples`."""
    if not examples:
        return float("nan"), float("nan")
    total_loss, correct = 0.0, 0
    for start in range(0, len(examples), batch_size):
        batch = Batch.from_examples(examples[start : start + batch_size])
        probs = filter_batch(params, batch)
        n = len(batch.labels)
        final = probs[np.arange(n), batch.lengths - 1]
        correct += int(np.sum(np.argmax(final, axis=1) == batch.labels))
        step_nll = -np.log(np.maximum(probs[np.arange(n), :, batch.labels], 1e-300))
        total_loss += float(np.sum(np.where(batch.mask, step_nll, 0.0).sum(axis=1) / batch.lengths))
    return total_loss / len(examples), correct / len(examples)


def train(
    dataset: LabelledDataset,
    config: TrainConfig,
    metrics_path: str | Path | None = None,
    initial: ClassifierParams | None = None,
    silent: bool = False,
) -> ClassifierParams:
    """Train on `dataset.train` and keep the parameters with the lowest validation loss.

    Without a validation split the training loss selects the parameters instead.

    Raises:
        NonFiniteLossError: a mini-batch produced a NaN or infinite loss.
    """
    counts = dataset.counts()["train"]
    if min(counts) < 1:
        raise ConfigError(f"Every label needs a training example, got counts {counts}")
    params = initial.copy() if initial is not None else ClassifierParams.initialize(dataset.n_classes, config.seed)
    if params.n_classes != dataset.n_classes:
        raise ConfigError(f"Parameters have {params.n_classes} classes, dataset has {dataset.n_classes}")
    optimizer = make_optimizer(params, config)
    validation = dataset.validation or dataset.train

    if metrics_path is not None:
        with open(metrics_path, "w", newline="") as f:
            csv.writer(f).writerow(METRICS_HEADER)

    best_loss, best = float("inf"), params.copy()
    for epoch in tqdm(range(1, config.epochs + 1), desc="Training", disable=silent):
        rng = stream(config.seed, Purpose.SHUFFLE, epoch, 1)
        epoch_loss = 0.0
        for i, indices in enumerate(iterate_minibatches(len(dataset.train), config.batch_size, rng)):
            loss, grads = batch_loss(params, Batch.from_examples([dataset.train[j] for j in indices]))
            if not np.isfinite(loss):
                raise NonFiniteLossError(f"Loss is {loss} at epoch {epoch}, batch {i} (batch size {len(indices)})")
            clip_gradients(grads, config.clip_norm)
            optimizer.step(params, grads)
            epoch_loss += loss * len(indices)
        train_loss = epoch_loss / len(dataset.train)
        val_loss, val_acc = evaluate(params, validation)
        if val_loss < best_loss:
            best_loss, best = val_loss, params.copy()
        if not silent:
            tqdm.write(f"epoch {epoch}: train loss {train_loss:.4f}, val loss {val_loss:.4f}, val acc {val_acc:.3f}")
        if metrics_path is not None:
            with open(metrics_path, "a", newline="") as f:
                csv.writer(f).writerow([epoch, repr(train_loss), repr(val_loss), repr(val_acc)])
    return best
