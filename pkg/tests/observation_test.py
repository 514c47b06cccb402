import numpy as np
import pytest

from recbayes.gridworld import DomainKind, EnvState, GridConfig


def test_corner_observation():
    from recbayes.gridworld import observe

    config = GridConfig.square(7, DomainKind.PP, n_agents=2)
    state = EnvState(config, ((0, 0), (1, 2)), ((2, 1),), (True,))
    obs = observe(state, 0)

    assert obs.shape == (5, 5, 5)
    assert obs.dtype == np.uint8
    assert obs[0, 3, 4] == 1 and obs[0].sum() == 1
    assert obs[1].sum() == 0 and obs[2].sum() == 0
    assert obs[3, 4, 3] == 1 and obs[3].sum() == 1
    # Two rows north and two columns west are outside
    assert obs[4, 0].all() and obs[4, 1].all()
    assert obs[4, :, 0].all() and obs[4, :, 1].all()
    assert obs[4, 2:, 2:].sum() == 0
    assert obs[4].sum() == 16


def test_teammate_channel_order():
    from recbayes.gridworld import observe

    config = GridConfig.square(7, DomainKind.PP, n_agents=4)
    state = EnvState(config, ((2, 2), (2, 3), (3, 3), (4, 4)), ((6, 0),), (True,))
    obs = observe(state, 2)

    assert obs[0, 1, 1] == 1  # agent 0
    assert obs[1, 1, 2] == 1  # agent 1
    assert obs[2, 3, 3] == 1  # agent 3
    assert obs[3].sum() == 0  # target is outside the window


def test_dead_targets_are_hidden():
    from recbayes.gridworld import observe

    config = GridConfig.square(7, DomainKind.LBF, n_agents=2, n_targets=2)
    state = EnvState(config, ((3, 3), (0, 0)), ((3, 4), (2, 3)), (False, True), (1, 1), (1, 1))
    obs = observe(state, 0)
    assert obs[3, 2, 3] == 0
    assert obs[3, 1, 2] == 1


@pytest.mark.parametrize("seed", range(5))
def test_pack_round_trip(seed: int):
    from recbayes.gridworld import observe, pack_observation, reset, unpack_observation

    state = reset(GridConfig.square(7), seed)
    for i in range(state.n_agents):
        obs = observe(state, i)
        packed = pack_observation(obs)
        assert len(packed) == 16
        assert np.array_equal(unpack_observation(packed), obs)


def test_pack_bit_layout():
    from recbayes.gridworld import pack_observation

    obs = np.zeros((5, 5, 5), dtype=np.uint8)
    obs[0, 0, 0] = 1
    obs[4, 4, 4] = 1  # flattened bit 124
    packed = pack_observation(obs)
    assert packed[0] == 0b00000001
    assert packed[15] == 0b00010000


@pytest.mark.parametrize("record", [bytes(15), bytes(17), bytes(15) + b"\x20"])
def test_unpack_malformed(record: bytes):
    from recbayes.errors import MalformedRecordError
    from recbayes.gridworld import unpack_observation

    with pytest.raises(MalformedRecordError):
        unpack_observation(record)


def test_pack_round_trip_random():
    from recbayes.gridworld import pack_observation, unpack_observation, unpack_observations

    rng = np.random.default_rng(11)
    observations = rng.integers(0, 2, (1000, 5, 5, 5), dtype=np.uint8)
    packed = np.frombuffer(b"".join(pack_observation(obs) for obs in observations), dtype=np.uint8).reshape(-1, 16)
    assert not (packed[:, 15] & 0xE0).any()
    for obs, record in zip(observations, packed):
        assert np.array_equal(unpack_observation(record.tobytes()), obs)
    assert np.array_equal(unpack_observations(packed), observations)
    assert len({record.tobytes() for record in packed}) == len({obs.tobytes() for obs in observations})


@pytest.mark.parametrize("domain", [DomainKind.LBF, DomainKind.PP])
@pytest.mark.parametrize("seed", range(20))
def test_observation_locality(domain: DomainKind, seed: int):
    from recbayes.gridworld import observe, reset

    config = GridConfig.square(10, domain, n_targets=4)
    state = reset(config, seed)
    row, col = state.agent_positions[0]
    inside = {(r, c) for r in range(row - 2, row + 3) for c in range(col - 2, col + 3)}
    expected = observe(state, 0)

    occupied = set(state.agent_positions) | set(state.target_positions)
    spare = [cell for cell in config.cells() if cell not in inside and cell not in occupied]
    for j in range(1, state.n_agents):
        if state.agent_positions[j] in inside:
            continue
        agents = list(state.agent_positions)
        agents[j] = spare[seed % len(spare)]
        assert np.array_equal(observe(state.replace(agent_positions=tuple(agents)), 0), expected)

    for i, cell in enumerate(state.target_positions):
        if cell in inside:
            continue
        alive = list(state.target_alive)
        alive[i] = False
        assert np.array_equal(observe(state.replace(target_alive=tuple(alive)), 0), expected)
        targets = list(state.target_positions)
        targets[i] = spare[(seed + i) % len(spare)]
        assert np.array_equal(observe(state.replace(target_positions=tuple(targets)), 0), expected)
