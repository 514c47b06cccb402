"""Experiment configuration and its flat `key = value` file format.

E.g.:
```
# 7x7 level-based foraging, team identification
domain = lbf
size = 7
set = team
agent = recbayes
trials = 16
checkpoint = runs/lbf7_team/classifier.rbck
```
"""

from __future__ import annotations

import dataclasses
import hashlib
import re
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from recbayes.bayes.enumeration import STATE_CAP
from recbayes.errors import ConfigError
from recbayes.gridworld.state import EPISODE_CAP, FOV, DomainKind, GridConfig
from recbayes.policies.scripted import MEMORY_HORIZON
from recbayes.teammates.tasks import ExperimentSet, TeamTaskId, experiment_set, parse_experiment_set


class AgentKind(str, Enum):
    ORIGINAL = "original"
    ORACLE = "oracle"
    RECBAYES = "recbayes"
    RANDOM = "random"
    EXACT_FILTER = "exact_filter"

    def __str__(self) -> str:
        return self.value


def _optional_path(value: str) -> str | None:
    return None if value.lower() in ("", "none") else value


def _enum(kind: type[Enum]) -> Callable[[str], Enum]:
    def convert(value: str) -> Enum:
        try:
            return kind(value.lower())
        except ValueError:
            raise ConfigError(f"Unknown value '{value}', expected one of {[str(v.value) for v in kind]}") from None

    return convert


# File key -> (field name, converter). Keys are written back in this order.
FILE_KEYS: dict[str, tuple[str, Callable[[str], object]]] = {
    "domain": ("domain", _enum(DomainKind)),
    "size": ("size", int),
    "agents": ("n_agents", int),
    "set": ("experiment_set", parse_experiment_set),
    "agent": ("agent", _enum(AgentKind)),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "max_steps": ("max_steps", int),
    "memory": ("memory_horizon", int),
    "checkpoint": ("checkpoint", _optional_path),
    "policies": ("policy_dir", _optional_path),
    "state_cap": ("state_cap", int),
    "workers": ("workers", int),
}
FIELD_KEYS = {name: key for key, (name, _) in FILE_KEYS.items()}


@dataclass(frozen=True)
class ExperimentConfig:
    """One evaluation cell family: a domain, a grid, an experiment set and the agent under test.

    Args:
        domain: Level-Based Foraging or Predator-Prey.
        size: Side length of the square grid.
        n_agents: Team size including the ad hoc agent.
        experiment_set: Which team-tasks are evaluated (team, task or both).
        agent: The agent placed in the ad hoc slot.
        trials: Trials per team-task.
        seed: Base seed; every trial seed derives from it.
        max_steps: Step cap of a trial.
        memory_horizon: Memory of the scripted best responses in steps.
        checkpoint: Classifier checkpoint, required by the `recbayes` agent.
        policy_dir: Directory of learned policy tables `k{k}.rbqp`. Scripted best responses without it.
        state_cap: State cap of the exact models built by the `exact_filter` agent.
        workers: Trials run in parallel on this many threads.
    """

    domain: DomainKind = DomainKind.LBF
    size: int = 7
    n_agents: int = 4
    experiment_set: ExperimentSet = ExperimentSet.TEAM
    agent: AgentKind = AgentKind.RECBAYES
    trials: int = 16
    seed: int = 0
    max_steps: int = EPISODE_CAP
    memory_horizon: int = MEMORY_HORIZON
    checkpoint: str | None = None
    policy_dir: str | None = None
    state_cap: int = STATE_CAP
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", _enum(DomainKind)(str(self.domain)))
        object.__setattr__(self, "experiment_set", parse_experiment_set(self.experiment_set))
        object.__setattr__(self, "agent", _enum(AgentKind)(str(self.agent)))
        if self.trials < 1:
            raise ConfigError(f"Need at least one trial per team-task, got {self.trials}")
        if not 1 <= self.max_steps <= EPISODE_CAP:
            raise ConfigError(f"Step cap must be between 1 and {EPISODE_CAP}, got {self.max_steps}")
        if self.workers < 1:
            raise ConfigError(f"Need at least one worker, got {self.workers}")
        if self.memory_horizon < 1:
            raise ConfigError(f"Memory horizon must be positive, got {self.memory_horizon}")
        self.grid()

    def grid(self) -> GridConfig:
        return GridConfig.square(
            self.size, self.domain, n_agents=self.n_agents, seed=self.seed, allow_small=self.size < FOV
        )

    def team_tasks(self) -> list[TeamTaskId]:
        return experiment_set(self.experiment_set)

    def replace(self, **overrides) -> ExperimentConfig:
        """Copy with every override that is not None applied. Accepts file keys or field names."""
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key in FILE_KEYS:
                key = FILE_KEYS[key][0]
            elif key not in FIELD_KEYS:
                raise ConfigError(f"Unknown configuration key '{key}'")
            changes[key] = value
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, str]:
        """File keys mapped to their textual values."""
        values = {}
        for key, (name, _) in FILE_KEYS.items():
            value = getattr(self, name)
            values[key] = "none" if value is None else str(value)
        return values

    def canonical(self) -> str:
        return "".join(f"{key} = {value}\n" for key, value in self.to_dict().items())

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.canonical())


def parse_config_stream(lines: Iterable[str]) -> ExperimentConfig:
    """Parse `key = value` lines. `#` starts a comment, blank lines are skipped.

    Raises:
        ConfigError: unknown key, repeated key, malformed line or value.
    """
    values = {}
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.search(r"^([A-Za-z_]+)\s*=\s*(.*?)$", line)
        if not m:
            raise ConfigError(f"Line {number}: expected 'key = value', got '{line}'")
        key, text = m.group(1).lower(), m.group(2)
        if key not in FILE_KEYS:
            raise ConfigError(f"Line {number}: unknown key '{key}', expected one of {list(FILE_KEYS)}")
        name, convert = FILE_KEYS[key]
        if name in values:
            raise ConfigError(f"Line {number}: key '{key}' given twice")
        try:
            values[name] = convert(text)
        except ValueError as e:
            raise ConfigError(f"Line {number}: invalid value '{text}' for '{key}': {e}") from e
    return ExperimentConfig(**values)


def parse_config(text: str) -> ExperimentConfig:
    return parse_config_stream(text.splitlines())


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read a configuration file, then apply `overrides` (None values are ignored)."""
    with open(path, encoding="utf-8") as f:
        config = parse_config_stream(f)
    return config.replace(**overrides)
