"""The replace-one-teammate trial protocol."""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from tqdm import tqdm

from recbayes.config import ExperimentConfig
from recbayes.gridworld.kernel import reset, step
from recbayes.gridworld.observation import observe
from recbayes.gridworld.state import EPISODE_CAP, GridConfig
from recbayes.harness.agents import AdHocAgent, make_agent_factory
from recbayes.harness.reporting import write_run
from recbayes.rng import Purpose, derive_seed, stream
from recbayes.teammates.strategies import team_act
from recbayes.teammates.tasks import TeamTaskId


@dataclass
class TrialResult:
    """Outcome of one trial.

    `trace` holds the agent's posterior after every step, shape (steps, K), for identification agents.
    """

    team_task: TeamTaskId
    trial: int
    seed: int
    slot: int
    steps: int
    capped: bool
    trace: np.ndarray | None = None
    warnings: list[tuple[str, str]] = field(default_factory=list)


def trial_seed(config: ExperimentConfig, team_task: TeamTaskId, trial: int) -> int:
    return derive_seed(config.seed, Purpose.TRIAL, team_task.k, trial)


def run_trial(
    config: GridConfig,
    team_task: TeamTaskId,
    agent: AdHocAgent,
    seed: int,
    trial: int = 0,
    max_steps: int = EPISODE_CAP,
) -> TrialResult:
    """Replace one uniformly drawn member of the team with `agent` and play until the task is solved.

    Args:
        config: Grid configuration.
        team_task: The team's strategy and task.
        agent: A fresh ad hoc agent.
        seed: Trial seed. Placement, slot, and every action draw derive from it.
        trial: Trial index, recorded only.
        max_steps: Step cap. A capped trial counts `max_steps` steps.
    """
    state = reset(config, seed)
    slot = int(stream(seed, Purpose.SLOT).integers(config.n_agents))
    agent.begin(config, team_task, slot, state)
    obs = observe(state, slot)
    trace = []
    while not state.done and state.t < max_steps:
        action = agent.act(obs, state, stream(seed, Purpose.ADHOC, 0, state.t))
        team = team_act(state, team_task.strategy, team_task.task, slot, stream(seed, Purpose.TEAM, 0, state.t))
        state, _, _ = step(state, [team.get(i, action) for i in range(config.n_agents)])
        obs = observe(state, slot)
        agent.update(action, obs)
        if agent.posterior is not None:
            trace.append(np.array(agent.posterior, dtype=np.float64))
    return TrialResult(
        team_task=team_task,
        trial=trial,
        seed=seed,
        slot=slot,
        steps=state.t,
        capped=not state.done,
        trace=np.array(trace) if trace else None,
        warnings=list(agent.warnings),
    )


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    agent_factory: Callable[[], AdHocAgent] | None = None,
    silent: bool = False,
) -> list[TrialResult]:
    """Run every trial of every team-task in the configured set.

    Results are ordered by (team-task, trial) whatever the number of workers. With `out_dir` the run
    directory is written: raw and summary CSVs, posterior traces, charts and the manifest.

    Raises:
        ConfigError: the agent's artifacts do not fit the configuration.
    """
    factory = agent_factory or make_agent_factory(config)
    grid = config.grid()
    jobs = [(team_task, trial) for team_task in config.team_tasks() for trial in range(config.trials)]

    def job(item: tuple[TeamTaskId, int]) -> TrialResult:
        team_task, trial = item
        return run_trial(grid, team_task, factory(), trial_seed(config, team_task, trial), trial, config.max_steps)

    desc = f"{config.agent} {config.domain}{config.size} {config.experiment_set}"
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(tqdm(pool.map(job, jobs), total=len(jobs), desc=desc, disable=silent))
    else:
        results = [job(item) for item in tqdm(jobs, desc=desc, disable=silent)]

    if out_dir is not None:
        write_run(config, results, out_dir)
    return results
