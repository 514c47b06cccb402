"""Collecting labelled ad hoc trajectories."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from recbayes.errors import MalformedRecordError
from recbayes.gridworld.kernel import reset, step
from recbayes.gridworld.observation import PACKED_SIZE, observe, pack_observation, unpack_observations
from recbayes.gridworld.state import N_ACTIONS, EnvState, GridConfig
from recbayes.policies.base import Policy, sample_action
from recbayes.policies.scripted import scripted_best_response
from recbayes.rng import Purpose, stream
from recbayes.teammates.strategies import team_act
from recbayes.teammates.tasks import TeamTaskId

RECORD_DTYPE = np.dtype([("action", "u1"), ("obs", "u1", (PACKED_SIZE,)), ("reward", "<f4")])


@dataclass(eq=False)
class Trajectory:
    """One episode of the ad hoc agent: record l holds (a_l, z_{l+1}, r_{l+1})."""

    records: np.ndarray
    _observations: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        self.records = np.asarray(self.records, dtype=RECORD_DTYPE)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def actions(self) -> np.ndarray:
        return self.records["action"]

    @property
    def rewards(self) -> np.ndarray:
        return self.records["reward"]

    @property
    def packed_observations(self) -> np.ndarray:
        return self.records["obs"]

    def observations(self) -> np.ndarray:
        """Unpacked observations, shape (T, 5, 5, 5). Unpacked on first use and kept read-only."""
        if self._observations is None:
            self._observations = unpack_observations(self.packed_observations)
            self._observations.flags.writeable = False
        return self._observations

    def equals(self, other: Trajectory) -> bool:
        return self.records.tobytes() == other.records.tobytes()


@dataclass
class TrajectoryBuffer:
    label: TeamTaskId
    max_len: int
    trajectories: list[Trajectory] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.trajectories)

    @property
    def lengths(self) -> list[int]:
        return [len(trajectory) for trajectory in self.trajectories]


def run_adhoc_episode(
    config: GridConfig,
    team_task: TeamTaskId,
    policy: Policy,
    seed: int,
    episode: int,
    max_len: int,
    epsilon: float = 0.0,
) -> Trajectory:
    """Play one seeded episode with `policy` in a uniformly drawn ad hoc slot.

    Every draw comes from a stream keyed by `(seed, episode, step)`, so an episode can be replayed
    on its own. With `epsilon > 0` the behavior is mixed with uniform random actions.
    """
    state = reset(config, seed, episode=episode)
    slot = int(stream(seed, Purpose.SLOT, episode).integers(config.n_agents))
    policy.reset(slot)
    obs = observe(state, slot)
    records = []
    while not state.done and state.t < max_len:
        dist = policy.act(obs)
        if epsilon:
            dist = (1.0 - epsilon) * dist + epsilon / N_ACTIONS
        action = sample_action(dist, stream(seed, Purpose.ADHOC, episode, state.t))
        policy.commit(action)
        team = team_act(state, team_task.strategy, team_task.task, slot, stream(seed, Purpose.TEAM, episode, state.t))
        state, rewards, _ = step(state, [team.get(i, action) for i in range(config.n_agents)])
        obs = observe(state, slot)
        records.append((int(action), np.frombuffer(pack_observation(obs), dtype=np.uint8), rewards[slot]))
    return Trajectory(np.array(records, dtype=RECORD_DTYPE))


def replay_episode(
    config: GridConfig, team_task: TeamTaskId, trajectory: Trajectory, seed: int, episode: int
) -> list[EnvState]:
    """Re-simulate a collected episode from its stream coordinates and recorded actions.

    Returns:
        The visited states, starting with the reset state.

    Raises:
        MalformedRecordError: a recorded observation or reward differs from the re-simulation.
    """
    state = reset(config, seed, episode=episode)
    slot = int(stream(seed, Purpose.SLOT, episode).integers(config.n_agents))
    states = [state]
    for t, record in enumerate(trajectory.records):
        team = team_act(state, team_task.strategy, team_task.task, slot, stream(seed, Purpose.TEAM, episode, state.t))
        state, rewards, _ = step(state, [team.get(i, int(record["action"])) for i in range(config.n_agents)])
        if pack_observation(observe(state, slot)) != record["obs"].tobytes():
            raise MalformedRecordError(f"Record {t} of episode {episode}: observation differs from the replay")
        if np.float32(rewards[slot]) != record["reward"]:
            raise MalformedRecordError(f"Record {t} of episode {episode}: reward differs from the replay")
        states.append(state)
    return states


def collect(
    config: GridConfig,
    team_task: TeamTaskId,
    behavior_policy: Policy | None = None,
    n_trajectories: int = 1000,
    max_len: int = 64,
    seed: int = 0,
    epsilon: float = 0.0,
    silent: bool = False,
) -> TrajectoryBuffer:
    """Collect `n_trajectories` episodes of at most `max_len` records for one team-task.

    Args:
        config: Grid configuration.
        team_task: Label of the collected data; its teammates fill every non-ad hoc slot.
        behavior_policy: Ad hoc behavior. Defaults to the scripted best response to `team_task`.
        n_trajectories: Number of episodes T.
        max_len: Truncation length L.
        seed: Stream seed.
        epsilon: Uniform-action mixing rate of the behavior policy.
        silent: Disable the progress bar.
    """
    policy = behavior_policy or scripted_best_response(team_task, config)
    buffer = TrajectoryBuffer(label=team_task, max_len=max_len)
    for episode in tqdm(range(n_trajectories), desc=f"Collecting {team_task:short}", disable=silent, leave=False):
        buffer.trajectories.append(run_adhoc_episode(config, team_task, policy, seed, episode, max_len, epsilon))
    return buffer


def collect_set(
    config: GridConfig,
    team_tasks: Sequence[TeamTaskId],
    n_trajectories: int = 1000,
    max_len: int = 64,
    seed: int = 0,
    epsilon: float = 0.0,
    workers: int = 1,
    behavior: Callable[[TeamTaskId], Policy] | None = None,
    silent: bool = False,
) -> list[TrajectoryBuffer]:
    """Collect every team-task of a set, optionally on a thread pool. Output order follows `team_tasks`."""

    def job(team_task: TeamTaskId) -> TrajectoryBuffer:
        policy = behavior(team_task) if behavior else None
        return collect(config, team_task, policy, n_trajectories, max_len, seed, epsilon, silent=True)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(job, team_tasks)
            return list(tqdm(results, total=len(team_tasks), desc="Collecting", disable=silent))
    return [job(team_task) for team_task in tqdm(team_tasks, desc="Collecting", disable=silent)]
