"""Scripted best response: play the team's own strategy from the ad hoc agent's observations.

The agent never sees its absolute position. It dead-reckons a displacement from its start cell, pins
each axis to the grid once a border comes into view, and keeps a short memory of where it last saw
teammates and targets. With nothing remembered it sweeps the grid in a lawnmower pattern.
"""

from __future__ import annotations

import numpy as np

from recbayes.gridworld.observation import TARGET_CHANNEL, WALL_CHANNEL, Observation, teammate_order
from recbayes.gridworld.state import FOV, MOVES, Action, Cell, GridConfig
from recbayes.policies.base import Policy, one_hot
from recbayes.teammates.strategies import Scene, strategy_action
from recbayes.teammates.tasks import TeamTaskId

MEMORY_HORIZON = 20
# Levels are not part of the observation. Equal levels make a level-driven choice fall to the first target in
# row-major order.
UNSEEN_LEVEL = 1
HALF = FOV // 2

OPPOSITE = {
    Action.NORTH: Action.SOUTH,
    Action.SOUTH: Action.NORTH,
    Action.EAST: Action.WEST,
    Action.WEST: Action.EAST,
}


def _clamp(value: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, value))


class ScriptedPolicy(Policy):
    """Plays `team_task.strategy` under `team_task.task` as if it were one of the teammates.

    Args:
        team_task: The team-task this policy responds to.
        config: Grid the policy is deployed on. Only the dimensions, domain and team size are used.
        horizon: Steps after which an unseen teammate or target is forgotten.
    """

    kind = "scripted"

    def __init__(self, team_task: TeamTaskId, config: GridConfig, horizon: int = MEMORY_HORIZON):
        self.team_task = team_task
        self.config = config
        self.horizon = horizon
        self.reset(0)

    def reset(self, agent_index: int) -> None:
        super().reset(agent_index)
        self.t = 0
        self.position: Cell = (0, 0)
        self.origin: list[int | None] = [None, None]
        self.teammates: dict[int, tuple[Cell, int]] = {}
        self.targets: dict[Cell, int] = {}
        self.last_obs: Observation | None = None
        self.heading = Action.EAST
        self.vertical = Action.SOUTH
        self.shift_left = 0

    def act(self, obs: Observation) -> np.ndarray:
        obs = np.asarray(obs)
        self._remember(obs)
        return one_hot(self._decide(obs))

    def commit(self, action: Action | int) -> None:
        action = Action(int(action))
        if action in MOVES and self.last_obs is not None:
            dr, dc = MOVES[action]
            if not self.last_obs[:, HALF + dr, HALF + dc].any():
                self.position = (self.position[0] + dr, self.position[1] + dc)
        self.t += 1

    def _relative(self, wr: int, wc: int) -> Cell:
        return self.position[0] + int(wr) - HALF, self.position[1] + int(wc) - HALF

    def _localize(self, walls: np.ndarray) -> None:
        for axis, size in ((0, self.config.height), (1, self.config.width)):
            full = walls.all(axis=1 - axis)
            before = [w for w in range(HALF) if full[w]]
            after = [w for w in range(HALF + 1, FOV) if full[w]]
            if before:
                absolute = HALF - 1 - max(before)
            elif after:
                absolute = size + HALF - min(after)
            else:
                continue
            self.origin[axis] = absolute - self.position[axis]

    def _remember(self, obs: Observation) -> None:
        self._localize(obs[WALL_CHANNEL].astype(bool))
        visible = {self._relative(wr, wc) for wr, wc in np.argwhere(obs[WALL_CHANNEL] == 0)}
        oldest = self.t - self.horizon

        self.targets = {cell: seen for cell, seen in self.targets.items() if seen > oldest and cell not in visible}
        self.teammates = {
            j: (cell, seen) for j, (cell, seen) in self.teammates.items() if seen > oldest and cell not in visible
        }
        for channel, j in enumerate(teammate_order(self.config.n_agents, self.agent_index)):
            hits = np.argwhere(obs[channel])
            if len(hits):
                self.teammates[j] = (self._relative(*hits[0]), self.t)
        for wr, wc in np.argwhere(obs[TARGET_CHANNEL]):
            self.targets[self._relative(wr, wc)] = self.t
        self.last_obs = obs

    def _estimate_origin(self, axis: int) -> int:
        """Known offset, or the one placing the agent nearest the centre that keeps memory in bounds."""
        if self.origin[axis] is not None:
            return self.origin[axis]
        size = self.config.height if axis == 0 else self.config.width
        position = self.position[axis]
        lo, hi = HALF - position, size - 1 - HALF - position
        preferred = _clamp((size - 1) // 2 - position, lo, hi) if lo <= hi else (size - 1) // 2 - position
        remembered = [cell[axis] for cell in self.targets] + [cell[axis] for cell, _ in self.teammates.values()]
        if remembered:
            lo = max(lo, -min(remembered))
            hi = min(hi, size - 1 - max(remembered))
            if lo <= hi:
                return _clamp(preferred, lo, hi)
        return preferred

    def _open(self, obs: Observation, action: Action) -> bool:
        dr, dc = MOVES[action]
        return not obs[WALL_CHANNEL, HALF + dr, HALF + dc]

    def _sweep(self, obs: Observation) -> Action:
        if self.shift_left and self._open(obs, self.vertical):
            self.shift_left -= 1
            return self.vertical
        self.shift_left = 0
        if self._open(obs, self.heading):
            return self.heading
        self.heading = OPPOSITE[self.heading]
        if not self._open(obs, self.vertical):
            self.vertical = OPPOSITE[self.vertical]
        self.shift_left = FOV - 1
        return self.vertical if self._open(obs, self.vertical) else self.heading

    def scene(self) -> Scene:
        """Best guess of the grid in absolute coordinates, targets in row-major order at `UNSEEN_LEVEL`."""
        dr, dc = self._estimate_origin(0), self._estimate_origin(1)
        config = self.config
        me = (self.position[0] + dr, self.position[1] + dc)
        agents = {self.agent_index: me}
        for j, (cell, _) in sorted(self.teammates.items()):
            cell = (cell[0] + dr, cell[1] + dc)
            if config.in_bounds(cell) and cell not in agents.values():
                agents[j] = cell
        targets = sorted(
            cell
            for cell in ((c[0] + dr, c[1] + dc) for c in self.targets)
            if config.in_bounds(cell) and cell not in agents.values()
        )
        return Scene(
            height=config.height,
            width=config.width,
            kind=config.domain_kind,
            n_agents=config.n_agents,
            agents=agents,
            targets=targets,
            target_levels=[UNSEEN_LEVEL] * len(targets),
        )

    def _decide(self, obs: Observation) -> Action:
        scene = self.scene() if self.targets else None
        if scene is None or not scene.targets:
            return self._sweep(obs)
        return strategy_action(scene, self.team_task.strategy, self.agent_index, self.team_task.task)


def scripted_best_response(team_task: TeamTaskId, config: GridConfig) -> ScriptedPolicy:
    return ScriptedPolicy(team_task, config)
