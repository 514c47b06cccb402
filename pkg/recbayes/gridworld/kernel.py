"""Episode reset and the deterministic transition function."""

from __future__ import annotations

from collections.abc import Sequence

from recbayes.errors import InvalidTransitionError, PlacementInfeasibleError
from recbayes.gridworld.domains import DomainRules, domain_step
from recbayes.gridworld.state import MOVES, Action, Cell, DomainKind, EnvState, GridConfig, shifted
from recbayes.rng import Purpose, stream

MAX_LEVEL = 3


def reset(config: GridConfig, seed: int | None = None, episode: int = 0) -> EnvState:
    """Sample an initial state.

    Targets are placed uniformly on interior cells, then agents uniformly on the remaining cells. In
    Level-Based Foraging agent levels are uniform in 1..3 and each food level is uniform in
    1..min(3, sum of agent levels), so every food can be loaded by the whole team.

    Args:
        config: Grid configuration.
        seed: Stream seed, defaults to `config.seed`.
        episode: Episode coordinate of the placement streams.
    """
    seed = config.seed if seed is None else seed
    cells = config.cells()
    interior = config.interior_cells()
    if config.n_agents + config.n_targets > len(cells) or config.n_targets > len(interior):
        raise PlacementInfeasibleError(
            f"Cannot place {config.n_agents} agents and {config.n_targets} targets on a "
            f"{config.width}x{config.height} grid"
        )

    rng = stream(seed, Purpose.PLACEMENT, episode)
    targets = tuple(interior[i] for i in rng.choice(len(interior), config.n_targets, replace=False))
    rest = [cell for cell in cells if cell not in targets]
    agents = tuple(rest[i] for i in rng.choice(len(rest), config.n_agents, replace=False))

    agent_levels: tuple[int, ...] = ()
    target_levels: tuple[int, ...] = ()
    if config.domain_kind == DomainKind.LBF:
        rng = stream(seed, Purpose.LEVELS, episode)
        agent_levels = tuple(int(x) for x in rng.integers(1, MAX_LEVEL + 1, config.n_agents))
        cap = min(MAX_LEVEL, sum(agent_levels))
        target_levels = tuple(int(x) for x in rng.integers(1, cap + 1, config.n_targets))

    return EnvState(
        config=config,
        agent_positions=agents,
        target_positions=targets,
        target_alive=(True,) * config.n_targets,
        agent_levels=agent_levels,
        target_levels=target_levels,
    )


def resolve_moves(state: EnvState, actions: Sequence[Action]) -> tuple[Cell, ...]:
    """Resolve simultaneous movement.

    A move fails when it leaves the grid, enters a live target, enters a cell whose occupant stays put,
    or swaps with another agent. When several agents contend for one cell the lowest index wins.
    Failures can cascade, so resolution repeats until stable. Chains and cycles of agents moving into
    vacated cells succeed.
    """
    current = state.agent_positions
    blocked = state.live_target_cells()
    destination: dict[int, Cell] = {}
    for i, action in enumerate(actions):
        if action in MOVES:
            cell = shifted(current[i], MOVES[action])
            if state.config.in_bounds(cell) and cell not in blocked:
                destination[i] = cell

    while True:
        staying = {current[i] for i in range(len(current)) if i not in destination}
        owner = {cell: i for i, cell in enumerate(current)}
        failed = set()
        claims: dict[Cell, int] = {}
        for i in sorted(destination):
            cell = destination[i]
            if cell in staying:
                failed.add(i)
            j = owner.get(cell)
            if j is not None and destination.get(j) == current[i]:
                failed |= {i, j}
            if cell in claims:
                failed.add(i)
            else:
                claims[cell] = i
        if not failed:
            break
        for i in failed:
            del destination[i]

    return tuple(destination.get(i, cell) for i, cell in enumerate(current))


def step(state: EnvState, joint_action: Sequence[Action | int]) -> tuple[EnvState, list[float], bool]:
    """Advance one step: movement, then the domain rule, then the step counter.

    Returns:
        The successor state, per-agent rewards and the terminal flag.
    """
    if state.done:
        raise InvalidTransitionError(f"Cannot step a terminal state (t={state.t})")
    if len(joint_action) != state.n_agents:
        raise InvalidTransitionError(f"Joint action has {len(joint_action)} entries, expected {state.n_agents}")
    try:
        actions = [Action(a) for a in joint_action]
    except ValueError as e:
        raise InvalidTransitionError(f"Invalid joint action {list(joint_action)}") from e
    if state.config.domain_kind == DomainKind.PP:
        actions = [Action.NOOP if a == Action.INTERACT else a for a in actions]

    moved = state.replace(agent_positions=resolve_moves(state, actions))
    successor, rewards = domain_step(moved, actions, DomainRules.from_config(state.config))
    successor = successor.replace(t=state.t + 1)
    return successor, rewards, successor.done
