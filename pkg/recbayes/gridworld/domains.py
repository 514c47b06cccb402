"""Rule sets layered on the kernel: Level-Based Foraging and Predator-Prey."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from recbayes.errors import ConfigError
from recbayes.gridworld.state import (
    MOVES,
    Action,
    Cell,
    DomainKind,
    EnvState,
    GridConfig,
    chebyshev,
    manhattan,
    shifted,
)

REWARD_SCHEMES = ("sparse",)

# Prey evasion candidates in tie-breaking order: stay first, then N, S, E, W.
EVASION_MOVES: tuple[Cell, ...] = ((0, 0), *MOVES.values())


@dataclass(frozen=True)
class DomainRules:
    kind: DomainKind
    capture_requirement: int = 2
    reward_scheme: str = "sparse"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if not 1 <= self.capture_requirement <= 4:
            raise ConfigError(f"Capture requirement must be in 1..4, got {self.capture_requirement}")
        if self.reward_scheme not in REWARD_SCHEMES:
            raise ConfigError(f"Unknown reward scheme '{self.reward_scheme}', expected one of {REWARD_SCHEMES}")

    @classmethod
    def from_config(cls, config: GridConfig) -> DomainRules:
        return cls(kind=config.domain_kind, capture_requirement=config.capture_requirement)


def adjacent_agents(state: EnvState, cell: Cell, among: Iterable[int] | None = None) -> list[int]:
    """Indices of agents orthogonally adjacent to `cell`, ascending."""
    candidates = range(state.n_agents) if among is None else sorted(among)
    return [i for i in candidates if manhattan(state.agent_positions[i], cell) == 1]


def apply_lbf_interact(state: EnvState, interactors: Iterable[int]) -> tuple[EnvState, list[float]]:
    """Load every food whose adjacent interacting agents reach its level.

    Foods are resolved in index order against the same set of interacting agents, so one agent may
    help load several foods in the same step. Each participant of a successful load earns 1.

    Returns:
        The state with loaded foods removed, and the per-agent rewards.
    """
    interactors = set(interactors)
    rewards = [0.0] * state.n_agents
    alive = list(state.target_alive)
    for target in state.live_targets():
        group = adjacent_agents(state, state.target_positions[target], among=interactors)
        if group and sum(state.agent_levels[i] for i in group) >= state.target_levels[target]:
            alive[target] = False
            for i in group:
                rewards[i] += 1.0
    return state.replace(target_alive=tuple(alive)), rewards


def evade(state: EnvState) -> EnvState:
    """Move every live prey, in index order, to the free neighbour farthest from the predators.

    Distance is the minimum Chebyshev distance to any predator. Staying is a candidate; ties resolve in
    the order stay, N, S, E, W.
    """
    positions = list(state.target_positions)
    for prey in state.live_targets():
        blocked = set(state.agent_positions) | {positions[j] for j in state.live_targets() if j != prey}
        best, best_score = positions[prey], None
        for delta in EVASION_MOVES:
            cell = shifted(positions[prey], delta)
            if not state.config.in_bounds(cell) or cell in blocked:
                continue
            score = min(chebyshev(cell, agent) for agent in state.agent_positions)
            if best_score is None or score > best_score:
                best, best_score = cell, score
        positions[prey] = best
    return state.replace(target_positions=tuple(positions))


def apply_pp_capture(state: EnvState, rules: DomainRules | None = None) -> tuple[EnvState, list[float], bool]:
    """Capture surrounded prey, then let the survivors evade.

    Returns:
        The new state, per-agent rewards (1 to every predator adjacent to a captured prey), and whether
        every prey has been captured.
    """
    rules = rules or DomainRules.from_config(state.config)
    rewards = [0.0] * state.n_agents
    alive = list(state.target_alive)
    for prey in state.live_targets():
        hunters = adjacent_agents(state, state.target_positions[prey])
        if len(hunters) >= rules.capture_requirement:
            alive[prey] = False
            for i in hunters:
                rewards[i] += 1.0
    state = evade(state.replace(target_alive=tuple(alive)))
    return state, rewards, state.done


def domain_step(state: EnvState, actions: Sequence[Action], rules: DomainRules) -> tuple[EnvState, list[float]]:
    """Apply the rule set after movement has been resolved."""
    if rules.kind == DomainKind.LBF:
        return apply_lbf_interact(state, [i for i, a in enumerate(actions) if a == Action.INTERACT])
    state, rewards, _ = apply_pp_capture(state, rules)
    return state, rewards
