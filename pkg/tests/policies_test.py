import os

import numpy as np
import pytest

from recbayes.gridworld import Action, DomainKind, EnvState, GridConfig
from recbayes.teammates import TaskSpec, TeamStrategy, TeamTaskId


def visible_state() -> EnvState:
    config = GridConfig.square(10, DomainKind.LBF, n_agents=4, n_targets=1)
    return EnvState(
        config=config,
        agent_positions=((5, 5), (4, 4), (6, 6), (5, 3)),
        target_positions=((3, 6),),
        target_alive=(True,),
        agent_levels=(1, 1, 1, 1),
        target_levels=(1,),
    )


@pytest.mark.parametrize(
    "distribution",
    [
        np.array([0.5, 0.5, 0.5, 0.0, 0.0, 0.0]),
        np.array([1.5, -0.5, 0.0, 0.0, 0.0, 0.0]),
        np.array([np.nan, 1.0, 0.0, 0.0, 0.0, 0.0]),
        np.ones(5) / 5,
    ],
)
def test_sample_action_rejects_non_simplex(distribution):
    from recbayes.errors import ContractViolationError
    from recbayes.policies import sample_action

    with pytest.raises(ContractViolationError):
        sample_action(distribution, np.random.default_rng(0))


def test_sample_action_frequencies():
    from scipy.stats import chisquare

    from recbayes.policies import sample_action

    rng = np.random.default_rng(1)
    distribution = np.array([0.1, 0.2, 0.3, 0.4, 0.0, 0.0])
    counts = np.bincount([sample_action(distribution, rng) for _ in range(4000)], minlength=6)
    assert counts[4] == 0 and counts[5] == 0
    assert chisquare(counts[:4], 4000 * distribution[:4]).pvalue > 1e-3


def test_sample_action_one_hot():
    from recbayes.policies import one_hot, sample_action

    rng = np.random.default_rng(2)
    for action in Action:
        assert all(sample_action(one_hot(action), rng) == action for _ in range(20))


def test_random_policy_is_uniform():
    from recbayes.policies import random_policy

    assert np.allclose(random_policy().act(np.zeros((5, 5, 5))), 1 / 6)


class FixedPolicy:
    def __init__(self, action: Action):
        self.action = action
        self.committed = []

    def act(self, obs):
        from recbayes.policies import one_hot

        return one_hot(self.action)

    def commit(self, action):
        self.committed.append(action)


def test_mixture_weights_policies():
    from recbayes.policies import commit_action, mixture_action

    policies = [FixedPolicy(Action.NORTH), FixedPolicy(Action.EAST), FixedPolicy(Action.NORTH)]
    posterior = np.array([0.2, 0.5, 0.3])
    dist = mixture_action(policies, posterior, np.zeros((5, 5, 5)))
    assert dist[Action.NORTH] == pytest.approx(0.5)
    assert dist[Action.EAST] == pytest.approx(0.5)

    # The most likely policy's action carries at least its posterior mass
    assert dist[Action.EAST] >= posterior.max()

    commit_action(policies, Action.EAST)
    assert all(p.committed == [Action.EAST] for p in policies)


def test_mixture_one_hot_posterior():
    from recbayes.policies import mixture_action

    policies = [FixedPolicy(Action.NORTH), FixedPolicy(Action.WEST)]
    dist = mixture_action(policies, np.array([0.0, 1.0]), np.zeros((5, 5, 5)))
    assert dist[Action.WEST] == 1.0


def test_mixture_rejects_mismatched_posterior():
    from recbayes.errors import ContractViolationError
    from recbayes.policies import mixture_action

    with pytest.raises(ContractViolationError):
        mixture_action([FixedPolicy(Action.NOOP)], np.array([0.5, 0.5]), np.zeros((5, 5, 5)))


@pytest.mark.parametrize("strategy", list(TeamStrategy))
@pytest.mark.parametrize("token", ["nesw", "free"])
def test_scripted_matches_full_state_strategy(strategy: TeamStrategy, token: str):
    from recbayes.gridworld import observe
    from recbayes.policies import scripted_best_response
    from recbayes.teammates import Scene, strategy_action

    state = visible_state()
    team_task = TeamTaskId(1, strategy, TaskSpec.parse(token))
    policy = scripted_best_response(team_task, state.config)
    policy.reset(0)

    dist = policy.act(observe(state, 0))
    expected = strategy_action(Scene.from_state(state), strategy, 0, team_task.task)
    assert int(np.argmax(dist)) == expected
    assert dist.max() == 1.0


def test_scripted_sweeps_without_targets():
    from recbayes.gridworld import observe
    from recbayes.policies import scripted_best_response

    config = GridConfig.square(10, DomainKind.PP, n_agents=2)
    state = EnvState(config, ((5, 5), (0, 0)), ((9, 1),), (True,))
    policy = scripted_best_response(TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("nesw")), config)
    policy.reset(0)
    assert int(np.argmax(policy.act(observe(state, 0)))) == Action.EAST


def test_scripted_dead_reckoning():
    from recbayes.gridworld import observe
    from recbayes.policies import ScriptedPolicy

    config = GridConfig.square(10, DomainKind.PP, n_agents=2)
    team_task = TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("nesw"))
    policy = ScriptedPolicy(team_task, config)
    policy.reset(0)

    policy.act(observe(EnvState(config, ((5, 5), (0, 0)), ((9, 1),), (True,)), 0))
    policy.commit(Action.EAST)
    assert policy.position == (0, 1)

    # A teammate directly north blocks the move
    policy.act(observe(EnvState(config, ((5, 6), (4, 6)), ((9, 1),), (True,)), 0))
    policy.commit(Action.NORTH)
    assert policy.position == (0, 1)


def test_scripted_localizes_on_walls():
    from recbayes.gridworld import observe
    from recbayes.policies import ScriptedPolicy

    config = GridConfig.square(10, DomainKind.PP, n_agents=2)
    policy = ScriptedPolicy(TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("nesw")), config)
    policy.reset(1)
    policy.act(observe(EnvState(config, ((5, 5), (9, 5)), ((3, 3),), (True,)), 1))
    assert policy.origin == [9, None]


def test_scripted_forgets_vanished_targets():
    from recbayes.gridworld import observe
    from recbayes.policies import ScriptedPolicy

    config = GridConfig.square(10, DomainKind.LBF, n_agents=2, n_targets=1)
    policy = ScriptedPolicy(TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("free")), config)
    policy.reset(0)
    state = EnvState(config, ((5, 5), (0, 0)), ((5, 7),), (True,), (1, 1), (1,))
    policy.act(observe(state, 0))
    assert len(policy.targets) == 1
    policy.commit(Action.NOOP)
    policy.act(observe(state.replace(target_alive=(False,)), 0))
    assert policy.targets == {}


def test_scripted_scene_targets_at_unseen_level():
    from recbayes.gridworld import observe
    from recbayes.policies import ScriptedPolicy
    from recbayes.policies.scripted import UNSEEN_LEVEL
    from recbayes.teammates.strategies import highest_value_target

    config = GridConfig.square(10, DomainKind.LBF, n_agents=2, n_targets=2)
    policy = ScriptedPolicy(TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("free")), config)
    policy.reset(0)
    state = EnvState(config, ((5, 5), (0, 0)), ((6, 4), (4, 6)), (True, True), (1, 1), (1, 3))
    policy.act(observe(state, 0))
    scene = policy.scene()
    assert scene.target_levels == [UNSEEN_LEVEL, UNSEEN_LEVEL]
    assert scene.targets == sorted(scene.targets)
    assert highest_value_target(scene) == 0


def test_qtable_bandit():
    from recbayes.policies import QTable

    table = QTable()
    key = bytes(17)
    rng = np.random.default_rng(0)
    for _ in range(100):
        action = int(rng.integers(2))
        table.update(key, action, float(action == 1), key, True, 0.1, 0.95)
    assert int(np.argmax(table.greedy_distribution(key, 0.0))) == 1


def test_qtable_ties_are_uniform():
    from recbayes.policies import QTable

    dist = QTable().greedy_distribution(bytes(17), 0.05)
    assert np.allclose(dist, 1 / 6)


def test_qtable_file_round_trip(tmp_path):
    from recbayes.policies import QTable

    rng = np.random.default_rng(3)
    table = QTable({bytes(rng.integers(0, 256, 17, dtype=np.uint8)): rng.normal(size=6) for _ in range(10)})
    table.save(tmp_path / "a.rbqp")
    loaded = QTable.load(tmp_path / "a.rbqp")
    loaded.save(tmp_path / "b.rbqp")
    assert (tmp_path / "a.rbqp").read_bytes() == (tmp_path / "b.rbqp").read_bytes()
    for key, values in table.table.items():
        assert np.array_equal(loaded.values(key), values)


def test_qtable_bad_files(tmp_path):
    from recbayes.errors import BadMagicError, TruncatedFileError
    from recbayes.policies import QTable

    (tmp_path / "bad.rbqp").write_bytes(b"XXXX" + bytes(9))
    with pytest.raises(BadMagicError):
        QTable.load(tmp_path / "bad.rbqp")

    QTable({bytes(17): np.ones(6)}).save(tmp_path / "ok.rbqp")
    (tmp_path / "cut.rbqp").write_bytes((tmp_path / "ok.rbqp").read_bytes()[:-4])
    with pytest.raises(TruncatedFileError):
        QTable.load(tmp_path / "cut.rbqp")


def test_qtable_rejects_other_key_width(tmp_path):
    import struct

    from recbayes.errors import FormatError
    from recbayes.policies import QTable

    QTable({bytes(17): np.ones(6)}).save(tmp_path / "ok.rbqp")
    data = (tmp_path / "ok.rbqp").read_bytes()

    (tmp_path / "narrow.rbqp").write_bytes(data[:5] + struct.pack("<I", 16) + data[9:])
    with pytest.raises(FormatError, match="key width 16"):
        QTable.load(tmp_path / "narrow.rbqp")

    (tmp_path / "long.rbqp").write_bytes(data + b"\x00")
    with pytest.raises(FormatError, match="trailing"):
        QTable.load(tmp_path / "long.rbqp")


def test_tabular_learn_without_episodes_is_uniform():
    from recbayes.gridworld import observe, reset
    from recbayes.policies import tabular_learn

    config = GridConfig.square(5)
    policy = tabular_learn(config, TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("nesw")), episodes=0)
    policy.reset(0)
    assert np.allclose(policy.act(observe(reset(config, 0), 0)), 1 / 6)


def test_tabular_learn_fills_table():
    from recbayes.policies import tabular_learn

    config = GridConfig.square(5, n_agents=2, n_targets=1)
    policy = tabular_learn(config, TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("nesw")), episodes=5, seed=4)
    assert len(policy.table) > 0


@pytest.mark.parametrize("k", [0, 1, 2])
def test_mixture_one_hot_follows_solo_policy_over_an_episode(k: int):
    from recbayes.gridworld import observe, reset, step
    from recbayes.policies import commit_action, mixture_action, sample_action, scripted_best_response
    from recbayes.rng import Purpose, stream
    from recbayes.teammates import experiment_set, team_act

    config = GridConfig.square(7)
    team_tasks = experiment_set("team")
    library = [scripted_best_response(team_task, config) for team_task in team_tasks]
    solo = scripted_best_response(team_tasks[k], config)
    slot = 1
    for policy in library + [solo]:
        policy.reset(slot)
    posterior = np.eye(len(team_tasks))[k]

    state = reset(config, 9)
    while not state.done and state.t < 60:
        obs = observe(state, slot)
        mixed = mixture_action(library, posterior, obs)
        alone = solo.act(obs)
        assert np.array_equal(mixed, alone)
        action = sample_action(alone, stream(9, Purpose.ADHOC, 0, state.t))
        commit_action(library, action)
        solo.commit(action)
        team = team_act(state, team_tasks[k].strategy, team_tasks[k].task, slot, stream(9, Purpose.TEAM, 0, state.t))
        state, _, _ = step(state, [team.get(i, action) for i in range(config.n_agents)])


@pytest.mark.skipif(not os.environ.get("RECBAYES_SLOW"), reason="set RECBAYES_SLOW=1 for desk-scale runs")
def test_tabular_learn_approaches_scripted():
    from recbayes.harness import PolicyAgent, run_trial
    from recbayes.policies import scripted_best_response, tabular_learn

    config = GridConfig.square(5)
    team_task = TeamTaskId(1, TeamStrategy.GREEDY, TaskSpec.parse("nesw"))
    learned = tabular_learn(config, team_task, episodes=20000, seed=0)

    def mean_steps(policy) -> float:
        return float(np.mean([run_trial(config, team_task, PolicyAgent(policy), 10_000 + s).steps for s in range(200)]))

    assert mean_steps(learned) <= 1.5 * mean_steps(scripted_best_response(team_task, config))
