"""Agents that can fill the ad hoc slot of a team."""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from recbayes.bayes.enumeration import ModelSet, enumerate_models
from recbayes.bayes.pomdp import posterior_update
from recbayes.classifier.checkpoint import load_checkpoint
from recbayes.classifier.model import initial_hidden, posterior_step, prior
from recbayes.classifier.params import ClassifierParams
from recbayes.config import AgentKind, ExperimentConfig
from recbayes.errors import ConfigError, DegenerateEvidenceError, IncompatibleCheckpointError
from recbayes.gridworld.observation import Observation
from recbayes.gridworld.state import Action, EnvState, GridConfig
from recbayes.policies.base import Policy, RandomPolicy, sample_action
from recbayes.policies.mixture import commit_action, mixture_action
from recbayes.policies.scripted import MEMORY_HORIZON, ScriptedPolicy
from recbayes.policies.tabular import QTable, TabularPolicy
from recbayes.teammates.strategies import Scene, strategy_action
from recbayes.teammates.tasks import TeamTaskId


class AdHocAgent(ABC):
    """Plays one trial from the ad hoc slot.

    `posterior` is the current belief over the experiment set's team-tasks for identification agents and
    None otherwise. Anomalies are appended to `warnings` as `(level, message)` tuples.
    """

    kind: AgentKind

    def __init__(self) -> None:
        self.posterior: np.ndarray | None = None
        self.warnings: list[tuple[str, str]] = []

    def begin(self, config: GridConfig, team_task: TeamTaskId, slot: int, state: EnvState) -> None:
        """Start a trial. Only the oracle baselines may look at `team_task` and `state`."""
        self.config = config
        self.slot = slot

    @abstractmethod
    def act(self, obs: Observation, state: EnvState, rng: np.random.Generator) -> Action:
        ...

    def update(self, action: Action, obs: Observation) -> None:
        """Fold the executed action and the observation that followed it into the agent."""


class OriginalTeammate(AdHocAgent):
    """The team's own strategy with full state access: the team runs unchanged."""

    kind = AgentKind.ORIGINAL

    def begin(self, config: GridConfig, team_task: TeamTaskId, slot: int, state: EnvState) -> None:
        super().begin(config, team_task, slot, state)
        self.team_task = team_task

    def act(self, obs: Observation, state: EnvState, rng: np.random.Generator) -> Action:
        scene = Scene.from_state(state)
        return strategy_action(scene, self.team_task.strategy, self.slot, self.team_task.task, rng)


class PolicyAgent(AdHocAgent):
    """Plays a single policy from observations, whatever the team."""

    def __init__(self, policy: Policy | None = None):
        super().__init__()
        self.policy = policy

    def begin(self, config: GridConfig, team_task: TeamTaskId, slot: int, state: EnvState) -> None:
        super().begin(config, team_task, slot, state)
        self.policy.reset(slot)

    def act(self, obs: Observation, state: EnvState, rng: np.random.Generator) -> Action:
        return sample_action(self.policy.act(obs), rng)

    def update(self, action: Action, obs: Observation) -> None:
        self.policy.commit(action)


class ScriptedOracle(PolicyAgent):
    """Best response to the true team-task, told in advance, playing from observations only."""

    kind = AgentKind.ORACLE

    def __init__(self, horizon: int = MEMORY_HORIZON):
        super().__init__()
        self.horizon = horizon

    def begin(self, config: GridConfig, team_task: TeamTaskId, slot: int, state: EnvState) -> None:
        self.policy = ScriptedPolicy(team_task, config, self.horizon)
        super().begin(config, team_task, slot, state)


class RandomAgent(PolicyAgent):
    kind = AgentKind.RANDOM

    def __init__(self) -> None:
        super().__init__(RandomPolicy())


@dataclass
class PolicyLibrary:
    """Best responses to every team-task of an experiment set, instantiated afresh for each trial.

    Scripted best responses unless learned `tables` are given, one per team-task in order.
    """

    config: GridConfig
    team_tasks: Sequence[TeamTaskId]
    tables: Sequence[QTable] | None = None
    horizon: int = MEMORY_HORIZON

    def build(self) -> list[Policy]:
        if self.tables is None:
            return [ScriptedPolicy(team_task, self.config, self.horizon) for team_task in self.team_tasks]
        return [TabularPolicy(table) for table in self.tables]

    @classmethod
    def load(
        cls, config: GridConfig, team_tasks: Sequence[TeamTaskId], policy_dir: str | Path | None, horizon: int
    ) -> PolicyLibrary:
        """Read `k{k}.rbqp` tables from `policy_dir`, or fall back to scripted policies without one."""
        if policy_dir is None:
            return cls(config, team_tasks, None, horizon)
        tables = []
        for team_task in team_tasks:
            path = Path(policy_dir) / f"k{team_task.k}.rbqp"
            if not path.is_file():
                raise ConfigError(f"Missing policy table {path} for team-task {team_task}")
            tables.append(QTable.load(path))
        return cls(config, team_tasks, tables, horizon)


class MixtureAgent(AdHocAgent):
    """Posterior-weighted mixture of a policy library. Subclasses maintain the posterior."""

    def __init__(self, library: PolicyLibrary):
        super().__init__()
        self.library = library

    def begin(self, config: GridConfig, team_task: TeamTaskId, slot: int, state: EnvState) -> None:
        super().begin(config, team_task, slot, state)
        self.policies = self.library.build()
        for policy in self.policies:
            policy.reset(slot)
        self.distribution: np.ndarray | None = None

    def act(self, obs: Observation, state: EnvState, rng: np.random.Generator) -> Action:
        self.distribution = mixture_action(self.policies, self.posterior, obs)
        return sample_action(self.distribution, rng)

    def update(self, action: Action, obs: Observation) -> None:
        commit_action(self.policies, action)
        self.observe(action, obs)

    @abstractmethod
    def observe(self, action: Action, obs: Observation) -> None:
        ...


class RecBayesAgent(MixtureAgent):
    """Mixture weighted by the recurrent classifier's posterior, starting from its zero-state prior."""

    kind = AgentKind.RECBAYES

    def __init__(self, params: ClassifierParams, library: PolicyLibrary):
        super().__init__(library)
        self.params = params

    def begin(self, config: GridConfig, team_task: TeamTaskId, slot: int, state: EnvState) -> None:
        super().begin(config, team_task, slot, state)
        self.hidden = initial_hidden()
        self.posterior = prior(self.params)

    def observe(self, action: Action, obs: Observation) -> None:
        self.posterior, self.hidden = posterior_step(self.params, self.hidden, action, obs)


class ModelCache:
    """Exact models per ad hoc slot, enumerated on first use and shared between threads."""

    def __init__(self, config: GridConfig, team_tasks: Sequence[TeamTaskId], state_cap: int):
        self.config = config
        self.team_tasks = list(team_tasks)
        self.state_cap = state_cap
        self._lock = threading.Lock()
        self._sets: dict[int, ModelSet] = {}

    def get(self, slot: int) -> ModelSet:
        with self._lock:
            if slot not in self._sets:
                self._sets[slot] = enumerate_models(self.config, self.team_tasks, slot, self.state_cap)
            return self._sets[slot]


class ExactFilterAgent(MixtureAgent):
    """Mixture weighted by the exact multi-model filter over enumerated team-task models.

    Starts from a uniform prior. Evidence no model explains resets posterior and beliefs to the start.
    """

    kind = AgentKind.EXACT_FILTER

    def __init__(self, models: ModelCache, library: PolicyLibrary):
        super().__init__(library)
        self.models = models

    def begin(self, config: GridConfig, team_task: TeamTaskId, slot: int, state: EnvState) -> None:
        super().begin(config, team_task, slot, state)
        self.model_set = self.models.get(slot)
        self._restart()

    def _restart(self) -> None:
        k = len(self.model_set.models)
        self.posterior = np.full(k, 1.0 / k)
        self.beliefs = [model.initial for model in self.model_set.models]

    def observe(self, action: Action, obs: Observation) -> None:
        z = self.model_set.obs_index(obs)
        if z is None:
            self.warnings.append(("WARNING", "Observation outside every enumerated model; posterior reset"))
            self._restart()
            return
        pi_prob = float(self.distribution[int(action)]) if self.distribution is not None else 1.0
        try:
            self.posterior, self.beliefs = posterior_update(
                self.model_set.models, self.beliefs, self.posterior, int(action), z, pi_prob
            )
        except DegenerateEvidenceError as e:
            self.warnings.append(("WARNING", f"{e}; posterior reset"))
            self._restart()


def load_classifier(config: ExperimentConfig) -> ClassifierParams:
    """Load the configured checkpoint and check it covers the configured experiment set."""
    if config.checkpoint is None:
        raise ConfigError(f"Agent '{config.agent}' needs a classifier checkpoint")
    k = len(config.team_tasks())
    try:
        return load_checkpoint(config.checkpoint, n_classes=k)
    except IncompatibleCheckpointError as e:
        raise ConfigError(f"Checkpoint does not fit experiment set '{config.experiment_set}' (K={k}): {e}") from e


def make_agent_factory(config: ExperimentConfig) -> Callable[[], AdHocAgent]:
    """Load the artifacts of the configured agent once and return a constructor of fresh agents."""
    grid, team_tasks = config.grid(), config.team_tasks()
    if config.agent == AgentKind.ORIGINAL:
        return OriginalTeammate
    if config.agent == AgentKind.RANDOM:
        return RandomAgent
    if config.agent == AgentKind.ORACLE:
        return lambda: ScriptedOracle(config.memory_horizon)

    library = PolicyLibrary.load(grid, team_tasks, config.policy_dir, config.memory_horizon)
    if config.agent == AgentKind.RECBAYES:
        params = load_classifier(config)
        return lambda: RecBayesAgent(params, library)
    models = ModelCache(grid, team_tasks, config.state_cap)
    return lambda: ExactFilterAgent(models, library)
