"""Stratified train/validation/test splits of labelled trajectories."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from recbayes.errors import ConfigError, StratificationError
from recbayes.rng import Purpose, stream
from recbayes.teammates.tasks import TeamTaskId
from recbayes.trajectories.collection import Trajectory, TrajectoryBuffer

SPLITS = ("train", "validation", "test")

Example = tuple[Trajectory, int]


@dataclass
class LabelledDataset:
    """Examples are (trajectory, zero-based class index) pairs; class index `i` is label `k = i + 1`."""

    labels: list[TeamTaskId]
    train: list[Example] = field(default_factory=list)
    validation: list[Example] = field(default_factory=list)
    test: list[Example] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    def split(self, name: str) -> list[Example]:
        if name not in SPLITS:
            raise ValueError(f"Unknown split '{name}', expected one of {SPLITS}")
        return getattr(self, name)

    def counts(self) -> dict[str, list[int]]:
        """Per-split example count of every class."""
        return {
            name: np.bincount([label for _, label in self.split(name)], minlength=self.n_classes).tolist()
            for name in SPLITS
        }


def split_sizes(n: int, fractions: Sequence[float]) -> list[int]:
    """Largest-remainder rounding of `n * fractions`."""
    raw = [n * f for f in fractions]
    sizes = [int(np.floor(x)) for x in raw]
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - sizes[i]), i))
    for i in order[: n - sum(sizes)]:
        sizes[i] += 1
    return sizes


def build_dataset(
    buffers: Sequence[TrajectoryBuffer],
    split: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> LabelledDataset:
    """Merge per-label buffers and split every label in the same proportions.

    Labels must be exactly 1..K. Each label's trajectories are shuffled with a stream keyed by the label,
    so the result does not depend on buffer order.

    Raises:
        StratificationError: a label cannot give at least one trajectory to every non-empty split.
    """
    if len(split) != 3 or any(f < 0 for f in split) or abs(sum(split) - 1.0) > 1e-9:
        raise ConfigError(f"Split fractions must be three non-negative numbers summing to 1, got {split}")

    by_k: dict[int, list[Trajectory]] = {}
    labels: dict[int, TeamTaskId] = {}
    for buffer in buffers:
        if buffer.label.k in labels and labels[buffer.label.k] != buffer.label:
            raise ConfigError(f"Label k={buffer.label.k} is used for two different team-tasks")
        labels[buffer.label.k] = buffer.label
        by_k.setdefault(buffer.label.k, []).extend(buffer.trajectories)
    if sorted(labels) != list(range(1, len(labels) + 1)):
        raise ConfigError(f"Labels must be 1..K, got {sorted(labels)}")

    dataset = LabelledDataset(labels=[labels[k] for k in sorted(labels)])
    for k in sorted(by_k):
        trajectories = by_k[k]
        sizes = split_sizes(len(trajectories), split)
        for name, fraction, size in zip(SPLITS, split, sizes):
            if fraction > 0 and size == 0:
                raise StratificationError(
                    f"Label {labels[k]} has {len(trajectories)} trajectories, too few for a {name} split of {fraction}"
                )
        order = stream(seed, Purpose.SHUFFLE, k).permutation(len(trajectories))
        start = 0
        for name, size in zip(SPLITS, sizes):
            dataset.split(name).extend((trajectories[i], k - 1) for i in order[start : start + size])
            start += size
    return dataset
