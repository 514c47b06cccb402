"""Hand-coded teammate strategies: Greedy, TeammateAware and ProbDest.

Strategies decide from a `Scene`, a possibly partial picture of the grid. Teammates build it from the
full state; the scripted best response builds it from its observation memory.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

from recbayes.gridworld.state import MOVES, Action, Cell, DomainKind, EnvState, manhattan, shifted
from recbayes.teammates.pathing import first_step
from recbayes.teammates.tasks import Direction, TaskSpec, TeamStrategy

SIDES = (Direction.NORTH, Direction.SOUTH, Direction.EAST, Direction.WEST)


@dataclass
class Scene:
    """What a strategy knows about the grid.

    Args:
        height: Grid height.
        width: Grid width.
        kind: Domain.
        n_agents: Team size.
        agents: Known agent cells by agent index. Must contain the deciding agent.
        targets: Live target cells.
        target_levels: Level of each target (LBF), aligned with `targets`.
    """

    height: int
    width: int
    kind: DomainKind
    n_agents: int
    agents: dict[int, Cell]
    targets: list[Cell]
    target_levels: list[int] = field(default_factory=list)

    @classmethod
    def from_state(cls, state: EnvState) -> Scene:
        live = state.live_targets()
        return cls(
            height=state.config.height,
            width=state.config.width,
            kind=state.config.domain_kind,
            n_agents=state.n_agents,
            agents=dict(enumerate(state.agent_positions)),
            targets=[state.target_positions[i] for i in live],
            target_levels=[state.target_levels[i] for i in live] if state.target_levels else [1] * len(live),
        )

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def obstacles(self, agent_index: int) -> set[Cell]:
        """Cells the agent cannot enter: its known teammates and all live targets."""
        return {cell for j, cell in self.agents.items() if j != agent_index} | set(self.targets)

    def plan(self, agent_index: int, goal: Cell, obstacles: set[Cell], rng: np.random.Generator | None) -> Action:
        move = first_step(self.height, self.width, self.agents[agent_index], goal, obstacles, rng)
        return Action.NOOP if move is None else move


def arrival_action(scene: Scene) -> Action:
    return Action.INTERACT if scene.kind == DomainKind.LBF else Action.NOOP


def nearest_target(scene: Scene, cell: Cell) -> int:
    """Index of the closest target by Manhattan distance, lowest index on ties."""
    return min(range(len(scene.targets)), key=lambda i: (manhattan(cell, scene.targets[i]), i))


def highest_value_target(scene: Scene) -> int:
    """Highest-level food (LBF) or the prey closest to the whole pack (PP), lowest index on ties."""
    if scene.kind == DomainKind.LBF:
        return min(range(len(scene.targets)), key=lambda i: (-scene.target_levels[i], i))
    return min(
        range(len(scene.targets)),
        key=lambda i: (sum(manhattan(cell, scene.targets[i]) for cell in scene.agents.values()), i),
    )


def side_cells(scene: Scene, target: Cell) -> list[Cell]:
    """In-bounds cells adjacent to a target, in N, S, E, W order."""
    return [cell for cell in (shifted(target, side.delta) for side in SIDES) if scene.in_bounds(cell)]


def approach_cell(
    scene: Scene, target: Cell, side: Direction | None, origin: Cell, avoid: set[Cell] = frozenset()
) -> Cell:
    """Cell from which an agent at `origin` should approach `target`.

    The assigned side when it is in bounds; otherwise, and under the Free task, the nearest adjacent cell
    not in `avoid`, ties resolved N, S, E, W. Falls back to ignoring `avoid` when every side is taken.
    """
    if side is not None:
        cell = shifted(target, side.delta)
        if scene.in_bounds(cell):
            return cell
    candidates = side_cells(scene, target)
    free = [cell for cell in candidates if cell not in avoid or cell == origin]
    return min(free or candidates, key=lambda cell: manhattan(origin, cell))


def greedy_move(scene: Scene, origin: Cell, goal: Cell) -> Action:
    """Move that closes the larger axis gap first, vertical on ties.

    Live targets are stepped around: the other closing axis is tried, then a sidestep.
    """
    dr, dc = goal[0] - origin[0], goal[1] - origin[1]
    vertical = Action.SOUTH if dr > 0 else Action.NORTH
    horizontal = Action.EAST if dc > 0 else Action.WEST
    closing = []
    if dr and (abs(dr) >= abs(dc) or not dc):
        closing = [vertical, horizontal] if dc else [vertical]
    elif dc:
        closing = [horizontal, vertical] if dr else [horizontal]
    if not dr:
        sidesteps = [Action.NORTH, Action.SOUTH]
    elif not dc:
        sidesteps = [Action.EAST, Action.WEST]
    else:
        sidesteps = []

    targets = set(scene.targets)
    for action in closing + sidesteps:
        cell = shifted(origin, MOVES[action])
        if scene.in_bounds(cell) and cell not in targets:
            return action
    return Action.NOOP


def greedy(scene: Scene, agent_index: int, task: TaskSpec, rng: np.random.Generator | None = None) -> Action:
    """Head for the nearest target without regard for teammates."""
    if not scene.targets:
        return Action.NOOP
    origin = scene.agents[agent_index]
    target = scene.targets[nearest_target(scene, origin)]
    goal = approach_cell(scene, target, task.direction(agent_index), origin)
    if origin == goal:
        return arrival_action(scene)
    return greedy_move(scene, origin, goal)


def teammate_aware(scene: Scene, agent_index: int, task: TaskSpec, rng: np.random.Generator | None = None) -> Action:
    """Head for the highest-value target along a shortest path around teammates and targets."""
    if not scene.targets:
        return Action.NOOP
    origin = scene.agents[agent_index]
    obstacles = scene.obstacles(agent_index)
    target = scene.targets[highest_value_target(scene)]
    goal = approach_cell(scene, target, task.direction(agent_index), origin, avoid=obstacles)
    if origin == goal:
        return arrival_action(scene)
    return scene.plan(agent_index, goal, obstacles - {goal}, rng)


def destinations(scene: Scene, target: Cell, task: TaskSpec) -> dict[int, Cell]:
    """Distinct approach cells for every known agent around one target.

    Assigned sides under a direction task. Under the Free task agents claim, in index order, the nearest
    unclaimed side; agents left without a side get none.
    """
    if not task.is_free:
        return {j: approach_cell(scene, target, task.direction(j), cell) for j, cell in sorted(scene.agents.items())}
    free = side_cells(scene, target)
    assigned = {}
    for j, cell in sorted(scene.agents.items()):
        if not free:
            break
        choice = min(free, key=lambda side: manhattan(cell, side))
        assigned[j] = choice
        free.remove(choice)
    return assigned


def prob_dest(scene: Scene, agent_index: int, task: TaskSpec, rng: np.random.Generator | None = None) -> Action:
    """Take up a distinct destination around the highest-value target and load together.

    In LBF an agent on its destination waits until every destination is occupied, then interacts.
    """
    if not scene.targets:
        return Action.NOOP
    origin = scene.agents[agent_index]
    target = scene.targets[highest_value_target(scene)]
    assigned = destinations(scene, target, task)
    goal = assigned.get(agent_index)
    if goal is None:
        return Action.NOOP
    if origin == goal:
        occupied = set(scene.agents.values())
        if scene.kind == DomainKind.LBF and all(cell in occupied for cell in assigned.values()):
            return Action.INTERACT
        return Action.NOOP
    obstacles = scene.obstacles(agent_index)
    reserved = {cell for j, cell in assigned.items() if j != agent_index}
    move = first_step(scene.height, scene.width, origin, goal, (obstacles | reserved) - {goal}, rng)
    if move is None:
        move = first_step(scene.height, scene.width, origin, goal, obstacles - {goal}, rng)
    return Action.NOOP if move is None else move


StrategyFn = Callable[..., Action]

STRATEGIES: Mapping[TeamStrategy, StrategyFn] = {
    TeamStrategy.GREEDY: greedy,
    TeamStrategy.TEAMMATE_AWARE: teammate_aware,
    TeamStrategy.PROB_DEST: prob_dest,
}


def strategy_action(
    scene: Scene,
    strategy: TeamStrategy,
    agent_index: int,
    task: TaskSpec,
    rng: np.random.Generator | None = None,
) -> Action:
    return STRATEGIES[TeamStrategy(strategy)](scene, agent_index, task, rng)


def team_act(
    state: EnvState,
    strategy: TeamStrategy,
    task: TaskSpec,
    adhoc_index: int,
    rng: np.random.Generator | None = None,
) -> dict[int, Action]:
    """Actions of every teammate (all agents but `adhoc_index`) from the full state.

    Args:
        state: Current state.
        strategy: Team strategy shared by all teammates.
        task: Approach-direction task.
        adhoc_index: Slot occupied by the ad hoc agent.
        rng: Tie-breaking stream, consumed in agent-index order. None for deterministic ties.
    """
    others = [i for i in range(state.n_agents) if i != adhoc_index]
    if state.done:
        return {i: Action.NOOP for i in others}
    scene = Scene.from_state(state)
    return {i: strategy_action(scene, strategy, i, task, rng) for i in others}
