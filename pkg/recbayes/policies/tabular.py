"""Tabular Q-learning best responses and their on-disk policy tables.

Table file layout (little-endian):

    magic "RBQP" | version u8 | key width u32 | entry count u32 |
    entries sorted by key: key bytes | 6 x f64 action values
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from tqdm import tqdm

from recbayes.errors import BadMagicError, FormatError, TruncatedFileError, UnsupportedVersionError
from recbayes.gridworld.kernel import reset, step
from recbayes.gridworld.observation import PACKED_SIZE, Observation, observe, pack_observation
from recbayes.gridworld.state import EPISODE_CAP, N_ACTIONS, Action, GridConfig
from recbayes.policies.base import Policy
from recbayes.rng import Purpose, stream
from recbayes.teammates.strategies import team_act
from recbayes.teammates.tasks import TeamTaskId

MAGIC = b"RBQP"
VERSION = 1
KEY_WIDTH = PACKED_SIZE + 1
NO_ACTION = N_ACTIONS
_HEADER = struct.Struct("<4sBII")


def table_key(packed_obs: bytes, previous_action: int) -> bytes:
    """Packed observation followed by the previously executed action (`NO_ACTION` at episode start)."""
    return bytes(packed_obs) + bytes([int(previous_action)])


class QTable:
    def __init__(self, values: dict[bytes, np.ndarray] | None = None):
        self.table: dict[bytes, np.ndarray] = dict(values or {})

    def __len__(self) -> int:
        return len(self.table)

    def values(self, key: bytes) -> np.ndarray:
        return self.table.get(key, np.zeros(N_ACTIONS))

    def update(
        self,
        key: bytes,
        action: int,
        reward: float,
        next_key: bytes,
        done: bool,
        learning_rate: float,
        discount: float,
    ) -> None:
        row = self.table.setdefault(key, np.zeros(N_ACTIONS))
        target = reward if done else reward + discount * float(self.values(next_key).max())
        row[int(action)] += learning_rate * (target - row[int(action)])

    def greedy_distribution(self, key: bytes, epsilon: float) -> np.ndarray:
        """Epsilon-greedy distribution, spreading the greedy mass evenly over tied best actions."""
        q = self.values(key)
        best = np.flatnonzero(q == q.max())
        dist = np.full(N_ACTIONS, epsilon / N_ACTIONS)
        dist[best] += (1.0 - epsilon) / len(best)
        return dist

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as f:
            f.write(_HEADER.pack(MAGIC, VERSION, KEY_WIDTH, len(self.table)))
            for key in sorted(self.table):
                f.write(key)
                f.write(np.asarray(self.table[key], dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> QTable:
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise TruncatedFileError(f"{path}: header is truncated")
        magic, version, key_width, count = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise BadMagicError(f"{path}: not a policy table (magic {magic!r})")
        if version != VERSION:
            raise UnsupportedVersionError(f"{path}: unsupported policy table version {version}")
        if key_width != KEY_WIDTH:
            raise FormatError(f"{path}: key width {key_width}, expected {KEY_WIDTH}")
        record = key_width + 8 * N_ACTIONS
        if len(data) < _HEADER.size + count * record:
            raise TruncatedFileError(f"{path}: expected {count} entries")
        if len(data) > _HEADER.size + count * record:
            raise FormatError(f"{path}: trailing bytes after {count} entries")
        table = {}
        offset = _HEADER.size
        for _ in range(count):
            key = data[offset : offset + key_width]
            table[key] = np.frombuffer(data, dtype="<f8", count=N_ACTIONS, offset=offset + key_width).astype(np.float64)
            offset += record
        return cls(table)


class TabularPolicy(Policy):
    """Epsilon-greedy policy over a learned `QTable`."""

    kind = "tabular"

    def __init__(self, table: QTable, epsilon: float = 0.05):
        self.table = table
        self.epsilon = epsilon
        self.reset(0)

    def reset(self, agent_index: int) -> None:
        super().reset(agent_index)
        self.previous = NO_ACTION
        self.key: bytes | None = None

    def act(self, obs: Observation) -> np.ndarray:
        self.key = table_key(pack_observation(obs), self.previous)
        return self.table.greedy_distribution(self.key, self.epsilon)

    def commit(self, action: Action | int) -> None:
        self.previous = int(action)


def tabular_learn(
    config: GridConfig,
    team_task: TeamTaskId,
    episodes: int,
    learning_rate: float = 0.1,
    discount: float = 0.95,
    epsilon_start: float = 1.0,
    epsilon_end: float = 0.05,
    seed: int = 0,
    silent: bool = True,
) -> TabularPolicy:
    """Learn a best response to one team-task with epsilon-greedy Q-learning.

    Exploration decays linearly from `epsilon_start` to `epsilon_end` over the episodes. Every episode
    places the learner in a uniformly drawn slot of the team.
    """
    table = QTable()
    for episode in tqdm(range(episodes), desc=f"Learning {team_task:short}", disable=silent):
        epsilon = epsilon_start + (epsilon_end - epsilon_start) * episode / max(1, episodes - 1)
        state = reset(config, seed, episode=episode)
        slot = int(stream(seed, Purpose.SLOT, episode).integers(config.n_agents))
        rng = stream(seed, Purpose.LEARN, episode)
        key = table_key(pack_observation(observe(state, slot)), NO_ACTION)
        done = False
        while not done and state.t < EPISODE_CAP:
            if rng.random() < epsilon:
                action = int(rng.integers(N_ACTIONS))
            else:
                q = table.values(key)
                action = int(rng.choice(np.flatnonzero(q == q.max())))
            team_rng = stream(seed, Purpose.TEAM, episode, state.t)
            team = team_act(state, team_task.strategy, team_task.task, slot, team_rng)
            joint = [team.get(i, action) for i in range(config.n_agents)]
            state, rewards, done = step(state, joint)
            next_key = table_key(pack_observation(observe(state, slot)), action)
            table.update(key, action, rewards[slot], next_key, done, learning_rate, discount)
            key = next_key
    return TabularPolicy(table)
