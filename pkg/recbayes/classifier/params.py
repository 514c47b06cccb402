"""Classifier parameter container and architecture constants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from recbayes.gridworld.observation import N_CHANNELS
from recbayes.gridworld.state import FOV, N_ACTIONS
from recbayes.rng import Purpose, stream

CONV1_FILTERS = 16
CONV2_FILTERS = 32
KERNEL = 3
CONV2_SIDE = FOV - KERNEL + 1
FLAT = CONV2_FILTERS * CONV2_SIDE * CONV2_SIDE
LATENT = 64
GRU_INPUT = LATENT + N_ACTIONS
HIDDEN = 128
MLP = 128

ARCHITECTURE = (N_CHANNELS, FOV, CONV1_FILTERS, CONV2_FILTERS, LATENT, N_ACTIONS, HIDDEN, MLP)

# Checkpoint order. Never reorder without bumping the checkpoint version.
PARAM_ORDER = (
    "conv1_w",
    "conv1_b",
    "conv2_w",
    "conv2_b",
    "proj_w",
    "proj_b",
    "gru_wz",
    "gru_uz",
    "gru_bz",
    "gru_wr",
    "gru_ur",
    "gru_br",
    "gru_wn",
    "gru_un",
    "gru_bn",
    "head_w1",
    "head_b1",
    "head_w2",
    "head_b2",
    "head_w3",
    "head_b3",
)


def param_shapes(n_classes: int) -> dict[str, tuple[int, ...]]:
    shapes = {
        "conv1_w": (CONV1_FILTERS, N_CHANNELS, KERNEL, KERNEL),
        "conv1_b": (CONV1_FILTERS,),
        "conv2_w": (CONV2_FILTERS, CONV1_FILTERS, KERNEL, KERNEL),
        "conv2_b": (CONV2_FILTERS,),
        "proj_w": (FLAT, LATENT),
        "proj_b": (LATENT,),
        "head_w1": (HIDDEN, MLP),
        "head_b1": (MLP,),
        "head_w2": (MLP, MLP),
        "head_b2": (MLP,),
        "head_w3": (MLP, n_classes),
        "head_b3": (n_classes,),
    }
    for gate in "zrn":
        shapes[f"gru_w{gate}"] = (GRU_INPUT, HIDDEN)
        shapes[f"gru_u{gate}"] = (HIDDEN, HIDDEN)
        shapes[f"gru_b{gate}"] = (HIDDEN,)
    return {name: shapes[name] for name in PARAM_ORDER}


def fan_in(shape: tuple[int, ...]) -> int:
    return int(np.prod(shape[1:])) if len(shape) == 4 else shape[0]


@dataclass
class ClassifierParams:
    """All weights of the recurrent classifier, float64, keyed by `PARAM_ORDER` names."""

    n_classes: int
    weights: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        if self.n_classes < 1:
            raise ValueError(f"Need at least one class, got {self.n_classes}")
        shapes = param_shapes(self.n_classes)
        if set(self.weights) != set(shapes):
            raise ValueError(f"Parameter names differ: {sorted(set(self.weights) ^ set(shapes))}")
        for name, shape in shapes.items():
            if self.weights[name].shape != shape:
                raise ValueError(f"Parameter {name} has shape {self.weights[name].shape}, expected {shape}")
            self.weights[name] = np.asarray(self.weights[name], dtype=np.float64)

    @classmethod
    def zeros(cls, n_classes: int) -> ClassifierParams:
        return cls(n_classes, {name: np.zeros(shape) for name, shape in param_shapes(n_classes).items()})

    @classmethod
    def initialize(cls, n_classes: int, seed: int = 0) -> ClassifierParams:
        """Weights uniform in +-1/sqrt(fan-in), biases zero."""
        rng = stream(seed, Purpose.INIT)
        weights = {}
        for name, shape in param_shapes(n_classes).items():
            if len(shape) == 1:
                weights[name] = np.zeros(shape)
            else:
                bound = 1.0 / np.sqrt(fan_in(shape))
                weights[name] = rng.uniform(-bound, bound, shape)
        return cls(n_classes, weights)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.weights[name]

    def items(self):
        return ((name, self.weights[name]) for name in PARAM_ORDER)

    def copy(self) -> ClassifierParams:
        return ClassifierParams(self.n_classes, {name: w.copy() for name, w in self.weights.items()})

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(w) for name, w in self.weights.items()}

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(w)) for w in self.weights.values())

    @property
    def size(self) -> int:
        return sum(w.size for w in self.weights.values())
