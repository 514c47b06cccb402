"""SVG charts of experiment runs."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# Fixed element ids, so re-runs write identical files.
plt.rcParams["svg.hashsalt"] = "recbayes"


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_posterior_trace(
    true_prob: Sequence[float], false_prob_sum: Sequence[float], path: str | Path, title: str = ""
) -> None:
    """Mean belief in the true team-task against the mean summed belief in the others, per step."""
    steps = np.arange(1, len(true_prob) + 1)
    fig = plt.figure(figsize=(6, 3.5))
    ax = fig.add_subplot()
    ax.plot(steps, true_prob, color="tab:green", label="true team-task")
    ax.plot(steps, false_prob_sum, color="tab:red", label="other team-tasks")
    ax.set_xlabel("step")
    ax.set_ylabel("posterior")
    ax.set_ylim(0, 1)
    ax.set_title(title)
    ax.legend(loc="center right")
    fig.tight_layout()
    _save(fig, path)


def plot_steps(labels: Sequence[str], means: Sequence[float], sds: Sequence[float], path: str | Path, title: str = ""):
    """Bar chart of mean steps with sample standard deviations, one bar per team-task."""
    fig = plt.figure(figsize=(max(4, 0.8 * len(labels) + 2), 3.5))
    ax = fig.add_subplot()
    ax.bar(np.arange(len(labels)), means, yerr=sds, capsize=3, color="tab:blue")
    ax.set_xticks(np.arange(len(labels)), labels, rotation=45, ha="right")
    ax.set_ylabel("steps")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
