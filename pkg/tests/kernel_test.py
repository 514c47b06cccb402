import pytest

from recbayes.gridworld import Action, DomainKind, EnvState, GridConfig

E, W, N, S, X, I = Action.EAST, Action.WEST, Action.NORTH, Action.SOUTH, Action.NOOP, Action.INTERACT


def make_state(config: GridConfig, agents, targets, agent_levels=(), target_levels=()) -> EnvState:
    return EnvState(
        config=config,
        agent_positions=tuple(agents),
        target_positions=tuple(targets),
        target_alive=(True,) * len(targets),
        agent_levels=tuple(agent_levels),
        target_levels=tuple(target_levels),
    )


@pytest.mark.parametrize("seed", [0, 1, 2, 123456789])
@pytest.mark.parametrize("domain", [DomainKind.LBF, DomainKind.PP])
def test_reset_invariants(seed: int, domain: DomainKind):
    from recbayes.gridworld import reset

    config = GridConfig.square(7, domain)
    state = reset(config, seed)
    state.validate()

    assert state.t == 0
    assert all(state.target_alive)
    for cell in state.target_positions:
        assert cell in config.interior_cells()
    if domain == DomainKind.LBF:
        assert all(1 <= level <= 3 for level in state.agent_levels)
        assert all(1 <= level <= min(3, sum(state.agent_levels)) for level in state.target_levels)
    else:
        assert state.agent_levels == () and state.target_levels == ()


def test_reset_is_deterministic():
    from recbayes.gridworld import reset

    config = GridConfig.square(10)
    assert reset(config, 7) == reset(config, 7)
    assert reset(config, 7, episode=3) == reset(config, 7, episode=3)
    assert len({reset(config, 7, episode=e) for e in range(20)}) > 1


def test_reset_placement_infeasible():
    from recbayes.errors import PlacementInfeasibleError
    from recbayes.gridworld import reset

    config = GridConfig.square(5, n_agents=4, n_targets=22)
    with pytest.raises(PlacementInfeasibleError):
        reset(config, 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(width=4, height=7),
        dict(n_agents=1),
        dict(n_agents=5),
        dict(n_targets=0),
        dict(fov=3),
        dict(capture_requirement=0),
    ],
)
def test_invalid_config(kwargs: dict):
    from recbayes.errors import ConfigError

    with pytest.raises(ConfigError):
        GridConfig(**kwargs)


@pytest.mark.parametrize(
    "agents,actions,expected",
    [
        # Contention: lower index wins
        ([(2, 3), (4, 3)], [S, N], [(3, 3), (4, 3)]),
        # Swap fails for both
        ([(3, 3), (3, 4)], [E, W], [(3, 3), (3, 4)]),
        # Out of bounds
        ([(0, 0), (6, 6)], [N, E], [(0, 0), (6, 6)]),
        # Into a staying agent
        ([(3, 3), (3, 4)], [E, X], [(3, 3), (3, 4)]),
        # Into the live target at (5, 5)
        ([(5, 4), (4, 5)], [E, S], [(5, 4), (4, 5)]),
    ],
)
def test_movement_resolution(agents, actions, expected):
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.PP, n_agents=2)
    state = make_state(config, agents, [(5, 5)])
    successor, _, _ = step(state, actions)
    assert list(successor.agent_positions) == expected
    assert successor.t == 1


def test_chain_and_cascade():
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.PP, n_agents=3)

    state = make_state(config, [(3, 1), (3, 2), (3, 3)], [(5, 5)])
    successor, _, _ = step(state, [E, E, E])
    assert successor.agent_positions == ((3, 2), (3, 3), (3, 4))

    # The front agent stays, so the whole chain is blocked
    successor, _, _ = step(state, [E, E, X])
    assert successor.agent_positions == state.agent_positions


def test_rotation_cycle():
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.PP, n_agents=4)
    state = make_state(config, [(2, 2), (2, 3), (3, 3), (3, 2)], [(5, 5)])
    successor, _, _ = step(state, [E, S, W, N])
    assert successor.agent_positions == ((2, 3), (3, 3), (3, 2), (2, 2))


def test_lbf_cooperative_load():
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.LBF, n_agents=2, n_targets=1)
    state = make_state(config, [(2, 3), (3, 2)], [(3, 3)], agent_levels=(1, 2), target_levels=(3,))

    successor, rewards, done = step(state, [I, I])
    assert successor.target_alive == (False,)
    assert rewards == [1.0, 1.0]
    assert done

    successor, rewards, done = step(state, [I, X])
    assert successor.target_alive == (True,)
    assert rewards == [0.0, 0.0]
    assert not done


def test_lbf_agent_loads_two_foods_in_one_step():
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.LBF, n_agents=2, n_targets=2)
    state = make_state(config, [(3, 3), (6, 6)], [(2, 3), (4, 3)], agent_levels=(2, 1), target_levels=(1, 2))

    successor, rewards, done = step(state, [I, X])
    assert successor.target_alive == (False, False)
    assert rewards == [2.0, 0.0]
    assert done


def test_pp_corner_capture():
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.PP, n_agents=2)
    state = make_state(config, [(0, 1), (1, 0)], [(0, 0)])
    successor, rewards, done = step(state, [X, X])
    assert done
    assert successor.prey_alive == (False,)
    assert rewards == [1.0, 1.0]


def test_pp_interact_is_noop():
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.PP, n_agents=2)
    state = make_state(config, [(3, 1), (6, 6)], [(3, 3)])
    assert step(state, [I, X]) == step(state, [X, X])


def test_pp_prey_evades():
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.PP, n_agents=2)
    state = make_state(config, [(3, 1), (6, 6)], [(3, 3)])
    successor, rewards, done = step(state, [X, X])
    assert successor.target_positions == ((3, 4),)
    assert rewards == [0.0, 0.0]
    assert not done


def test_terminal_and_malformed_steps():
    from recbayes.errors import InvalidTransitionError
    from recbayes.gridworld import step

    config = GridConfig.square(7, DomainKind.PP, n_agents=2)
    state = make_state(config, [(0, 1), (1, 0)], [(0, 0)])
    with pytest.raises(InvalidTransitionError):
        step(state, [X])
    with pytest.raises(InvalidTransitionError):
        step(state, [X, 9])

    terminal, _, done = step(state, [X, X])
    assert done
    with pytest.raises(InvalidTransitionError):
        step(terminal, [X, X])


@pytest.mark.parametrize("domain", [DomainKind.LBF, DomainKind.PP])
def test_random_rollouts_keep_invariants(domain: DomainKind):
    from recbayes.gridworld import reset, step
    from recbayes.rng import stream

    config = GridConfig.square(7, domain)
    for episode in range(10):
        state = reset(config, 11, episode=episode)
        rng = stream(11, 99, episode)
        while not state.done and state.t < 200:
            actions = [Action(a) for a in rng.integers(0, 6, config.n_agents)]
            successor, rewards, done = step(state, actions)
            successor.validate()
            assert successor.t == state.t + 1
            assert all(before or not after for before, after in zip(state.target_alive, successor.target_alive))
            assert done == (not any(successor.target_alive))
            assert all(r >= 0 for r in rewards)
            state = successor


def test_reset_positions_distinct_over_many_seeds():
    from recbayes.gridworld import reset

    config = GridConfig.square(7, n_agents=4, n_targets=3)
    states = [reset(config, seed) for seed in range(1000)]
    for state in states:
        cells = state.agent_positions + state.target_positions
        assert len(set(cells)) == 7
        assert all(config.in_bounds(cell) for cell in cells)
    assert len(set(states)) > 990


@pytest.mark.parametrize("domain", [DomainKind.LBF, DomainKind.PP])
@pytest.mark.parametrize("strategy", ["greedy", "teammate_aware", "prob_dest"])
def test_rewards_count_participants(domain: DomainKind, strategy: str):
    from recbayes.gridworld import reset, step
    from recbayes.gridworld.domains import adjacent_agents
    from recbayes.rng import Purpose, stream
    from recbayes.teammates import TaskSpec, TeamStrategy, team_act

    config = GridConfig.square(7, domain)
    task = TaskSpec.parse("free")
    for seed in range(5):
        state = reset(config, seed)
        total, expected = 0.0, 0
        while not state.done and state.t < 150:
            team = team_act(state, TeamStrategy(strategy), task, -1, stream(seed, Purpose.TEAM, 0, state.t))
            actions = [team[i] for i in range(config.n_agents)]
            successor, rewards, _ = step(state, actions)
            total += sum(rewards)
            removed = [i for i in state.live_targets() if not successor.target_alive[i]]
            for i in removed:
                among = [j for j, a in enumerate(actions) if a == I] if domain == DomainKind.LBF else None
                expected += len(adjacent_agents(successor, successor.target_positions[i], among=among))
            state = successor
        assert total == expected
        assert expected >= config.n_targets - len(state.live_targets())
