"""Exact tabular models of tiny gridworlds, built by exhaustive reachability search."""

from __future__ import annotations

import itertools
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from recbayes.bayes.pomdp import TabularPOMDP
from recbayes.errors import EnumerationInfeasibleError
from recbayes.gridworld.kernel import MAX_LEVEL, step
from recbayes.gridworld.observation import Observation, observe, pack_observation
from recbayes.gridworld.state import N_ACTIONS, Action, DomainKind, EnvState, GridConfig
from recbayes.teammates.strategies import team_act
from recbayes.teammates.tasks import TaskSpec, TeamStrategy, TeamTaskId

STATE_CAP = 20_000


class _ScriptedTies:
    """Stands in for the tie-breaking generator: replays a prefix of choices, then picks the first candidate."""

    def __init__(self, prefix: Sequence[int]):
        self.prefix = list(prefix)
        self.choices: list[int] = []
        self.arities: list[int] = []

    def integers(self, n: int) -> int:
        i = len(self.choices)
        choice = self.prefix[i] if i < len(self.prefix) else 0
        self.choices.append(choice)
        self.arities.append(n)
        return choice


def team_action_distribution(
    state: EnvState,
    strategy: TeamStrategy,
    task: TaskSpec,
    adhoc_index: int,
) -> list[tuple[float, dict[int, Action]]]:
    """Exact distribution of the team's joint action under uniform random tie-breaking.

    Walks every sequence of tie-break choices `team_act` can make, odometer style.
    """
    outcomes: dict[tuple, float] = defaultdict(float)
    prefix: list[int] = []
    while True:
        ties = _ScriptedTies(prefix)
        actions = team_act(state, strategy, task, adhoc_index, rng=ties)
        outcomes[tuple(sorted(actions.items()))] += float(np.prod([1.0 / n for n in ties.arities]))
        j = len(ties.choices) - 1
        while j >= 0 and ties.choices[j] == ties.arities[j] - 1:
            j -= 1
        if j < 0:
            break
        prefix = ties.choices[:j] + [ties.choices[j] + 1]
    return [(p, dict(key)) for key, p in outcomes.items()]


def initial_distribution(config: GridConfig) -> dict[EnvState, float]:
    """Exact distribution of `reset`: ordered target placements on interior cells, then agent placements."""
    cells, interior = config.cells(), config.interior_cells()
    target_tuples = list(itertools.permutations(interior, config.n_targets))

    levels: list[tuple[tuple[int, ...], tuple[int, ...], float]] = [((), (), 1.0)]
    if config.domain_kind == DomainKind.LBF:
        levels = []
        for agent_levels in itertools.product(range(1, MAX_LEVEL + 1), repeat=config.n_agents):
            cap = min(MAX_LEVEL, sum(agent_levels))
            p = (1 / MAX_LEVEL) ** config.n_agents / cap**config.n_targets
            for target_levels in itertools.product(range(1, cap + 1), repeat=config.n_targets):
                levels.append((agent_levels, target_levels, p))

    distribution: dict[EnvState, float] = defaultdict(float)
    for targets in target_tuples:
        rest = [cell for cell in cells if cell not in targets]
        agent_tuples = list(itertools.permutations(rest, config.n_agents))
        for agents in agent_tuples:
            p_place = 1 / len(target_tuples) / len(agent_tuples)
            for agent_levels, target_levels, p_levels in levels:
                state = EnvState(
                    config=config,
                    agent_positions=agents,
                    target_positions=targets,
                    target_alive=(True,) * config.n_targets,
                    agent_levels=agent_levels,
                    target_levels=target_levels,
                )
                distribution[state] += p_place * p_levels
    return distribution


@dataclass
class _Exploration:
    states: list[EnvState] = field(default_factory=list)
    observations: list[int] = field(default_factory=list)
    initial: dict[int, float] = field(default_factory=dict)
    transitions: list[dict[tuple[int, int], float]] = field(
        default_factory=lambda: [defaultdict(float) for _ in range(N_ACTIONS)]
    )
    rewards: list[np.ndarray] = field(default_factory=list)


def _explore(
    config: GridConfig,
    team_task: TeamTaskId,
    adhoc_index: int,
    state_cap: int,
    tie_breaking: bool,
    vocabulary: dict[bytes, int],
) -> _Exploration:
    found = _Exploration()
    index: dict[EnvState, int] = {}

    def visit(state: EnvState) -> int:
        key = state.replace(t=0)
        if key not in index:
            if len(found.states) >= state_cap:
                raise EnumerationInfeasibleError(
                    f"{config.width}x{config.height} {config.domain_kind} grid with {config.n_agents} agents exceeds "
                    f"the cap of {state_cap} states for {team_task:short}"
                )
            index[key] = len(found.states)
            found.states.append(key)
            obs = pack_observation(observe(key, adhoc_index))
            found.observations.append(vocabulary.setdefault(obs, len(vocabulary)))
        return index[key]

    for state, p in initial_distribution(config).items():
        x = visit(state)
        found.initial[x] = found.initial.get(x, 0.0) + p

    x = 0
    while x < len(found.states):
        state = found.states[x]
        reward = np.zeros(N_ACTIONS)
        if state.done:
            for a in range(N_ACTIONS):
                found.transitions[a][x, x] = 1.0
        else:
            if tie_breaking:
                team = team_action_distribution(state, team_task.strategy, team_task.task, adhoc_index)
            else:
                team = [(1.0, team_act(state, team_task.strategy, team_task.task, adhoc_index))]
            for a in Action:
                for p, others in team:
                    joint = [others.get(i, a) for i in range(state.n_agents)]
                    successor, rewards, _ = step(state, joint)
                    found.transitions[a][x, visit(successor)] += p
                    reward[a] += p * rewards[adhoc_index]
        found.rewards.append(reward)
        x += 1
    return found


def _assemble(found: _Exploration, n_obs: int) -> TabularPOMDP:
    n = len(found.states)
    observation = sparse.csr_matrix((np.ones(n), (np.arange(n), found.observations)), shape=(n, n_obs))
    transition = []
    for entries in found.transitions:
        rows, cols = zip(*entries.keys()) if entries else ((), ())
        transition.append(sparse.csr_matrix((list(entries.values()), (rows, cols)), shape=(n, n)))
    initial = np.zeros(n)
    for x, p in found.initial.items():
        initial[x] = p
    return TabularPOMDP(
        transition=transition,
        observation=[observation] * N_ACTIONS,
        reward=np.array(found.rewards),
        initial=initial / initial.sum(),
        states=found.states,
    )


def enumerate_model(
    config: GridConfig,
    team_task: TeamTaskId,
    adhoc_index: int = 0,
    state_cap: int = STATE_CAP,
    tie_breaking: bool = True,
    vocabulary: dict[bytes, int] | None = None,
) -> TabularPOMDP:
    """Exact POMDP of one team-task as seen from slot `adhoc_index`.

    States are the reachable joint states with the step counter dropped; terminal states absorb.
    Observation rows are one-hot since `observe` is deterministic.

    Args:
        config: A grid small enough to enumerate.
        team_task: Team strategy and task of the teammates.
        adhoc_index: Slot of the ad hoc agent.
        state_cap: Largest admissible number of states.
        tie_breaking: Model the teammates' uniform random tie-breaking. Without it ties go to the first move.
        vocabulary: Packed observation to index map, extended in place. Share it between models so their
            observation indices agree.

    Raises:
        EnumerationInfeasibleError: more than `state_cap` states are reachable.
    """
    vocabulary = {} if vocabulary is None else vocabulary
    found = _explore(config, team_task, adhoc_index, state_cap, tie_breaking, vocabulary)
    return _assemble(found, len(vocabulary))


@dataclass
class ModelSet:
    """Exact models of several team-tasks over one shared observation vocabulary."""

    team_tasks: list[TeamTaskId]
    models: list[TabularPOMDP]
    vocabulary: dict[bytes, int]
    adhoc_index: int

    def obs_index(self, obs: Observation | bytes) -> int | None:
        """Vocabulary index of an observation, None if no model can produce it."""
        key = obs if isinstance(obs, bytes) else pack_observation(obs)
        return self.vocabulary.get(key)


def enumerate_models(
    config: GridConfig,
    team_tasks: Sequence[TeamTaskId],
    adhoc_index: int = 0,
    state_cap: int = STATE_CAP,
    tie_breaking: bool = True,
) -> ModelSet:
    vocabulary: dict[bytes, int] = {}
    explored = [_explore(config, k, adhoc_index, state_cap, tie_breaking, vocabulary) for k in team_tasks]
    models = [_assemble(found, len(vocabulary)) for found in explored]
    return ModelSet(list(team_tasks), models, vocabulary, adhoc_index)
