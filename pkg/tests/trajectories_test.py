import numpy as np
import pytest

from recbayes.gridworld import GridConfig
from recbayes.teammates import TaskSpec, TeamStrategy, TeamTaskId, experiment_set

LABEL = TeamTaskId(2, TeamStrategy.TEAMMATE_AWARE, TaskSpec.parse("nesw"))


def random_trajectory(rng: np.random.Generator, length: int):
    from recbayes.trajectories import RECORD_DTYPE, Trajectory

    records = np.zeros(length, dtype=RECORD_DTYPE)
    records["action"] = rng.integers(0, 6, length)
    obs = rng.integers(0, 256, (length, 16))
    obs[:, 15] &= 0x1F
    records["obs"] = obs
    records["reward"] = rng.normal(size=length)
    return Trajectory(records)


def random_buffer(label: TeamTaskId, n: int, seed: int = 0, max_len: int = 32):
    from recbayes.trajectories import TrajectoryBuffer

    rng = np.random.default_rng(seed)
    trajectories = [random_trajectory(rng, int(rng.integers(1, max_len + 1))) for _ in range(n)]
    return TrajectoryBuffer(label=label, max_len=max_len, trajectories=trajectories)


def test_collect_single_record():
    from recbayes.trajectories import collect

    buffer = collect(GridConfig.square(7), LABEL, n_trajectories=1, max_len=1, silent=True)
    assert len(buffer) == 1
    assert len(buffer.trajectories[0]) == 1


def test_collect_lengths_and_determinism(tmp_path):
    from recbayes.trajectories import collect, save

    config = GridConfig.square(7)
    first = collect(config, LABEL, n_trajectories=6, max_len=16, seed=5, silent=True)
    second = collect(config, LABEL, n_trajectories=6, max_len=16, seed=5, silent=True)
    assert all(1 <= length <= 16 for length in first.lengths)
    for trajectory in first.trajectories:
        assert set(trajectory.actions) <= set(range(6))

    save(first, tmp_path / "first.rbtj")
    save(second, tmp_path / "second.rbtj")
    assert (tmp_path / "first.rbtj").read_bytes() == (tmp_path / "second.rbtj").read_bytes()


def test_replay_episode_checks_records():
    from recbayes.errors import MalformedRecordError
    from recbayes.trajectories import Trajectory, collect, replay_episode

    config = GridConfig.square(7)
    buffer = collect(config, LABEL, n_trajectories=3, max_len=12, seed=4, silent=True)
    for episode, trajectory in enumerate(buffer.trajectories):
        states = replay_episode(config, LABEL, trajectory, seed=4, episode=episode)
        assert len(states) == len(trajectory) + 1
        assert [state.t for state in states] == list(range(len(trajectory) + 1))

    records = buffer.trajectories[0].records.copy()
    records["obs"][-1, 0] ^= 1
    with pytest.raises(MalformedRecordError):
        replay_episode(config, LABEL, Trajectory(records), seed=4, episode=0)


def test_collect_set_preserves_order():
    from recbayes.trajectories import collect_set

    labels = experiment_set("team")
    buffers = collect_set(GridConfig.square(7), labels, n_trajectories=2, max_len=4, workers=2, silent=True)
    assert [buffer.label for buffer in buffers] == labels


def test_build_dataset_all_train():
    from recbayes.trajectories import build_dataset

    labels = experiment_set("team")
    dataset = build_dataset([random_buffer(label, 5, seed=label.k) for label in labels], split=(1.0, 0.0, 0.0))
    assert len(dataset.train) == 15
    assert dataset.validation == [] and dataset.test == []


def test_build_dataset_stratified():
    from recbayes.trajectories import build_dataset

    labels = experiment_set("team")
    buffers = [random_buffer(label, 100, seed=label.k) for label in labels]
    dataset = build_dataset(buffers, split=(0.8, 0.1, 0.1), seed=3)
    assert dataset.counts() == {"train": [80] * 3, "validation": [10] * 3, "test": [10] * 3}

    again = build_dataset(buffers, split=(0.8, 0.1, 0.1), seed=3)
    for name in ("train", "validation", "test"):
        assert [id(t) for t, _ in dataset.split(name)] == [id(t) for t, _ in again.split(name)]
    members = [id(t) for name in ("train", "validation", "test") for t, _ in dataset.split(name)]
    assert len(set(members)) == 300


def test_build_dataset_too_few():
    from recbayes.errors import StratificationError
    from recbayes.trajectories import build_dataset

    labels = experiment_set("team")
    buffers = [random_buffer(label, 2 if label.k == 2 else 50) for label in labels]
    with pytest.raises(StratificationError):
        build_dataset(buffers, split=(0.8, 0.1, 0.1))


def test_build_dataset_label_gap():
    from recbayes.errors import ConfigError
    from recbayes.trajectories import build_dataset

    with pytest.raises(ConfigError):
        build_dataset([random_buffer(LABEL, 10)], split=(1.0, 0.0, 0.0))


def test_save_load_empty(tmp_path):
    from recbayes.trajectories import TrajectoryBuffer, load, save

    save(TrajectoryBuffer(label=LABEL, max_len=64), tmp_path / "empty.rbtj")
    loaded = load(tmp_path / "empty.rbtj")
    assert loaded.label == LABEL
    assert loaded.max_len == 64
    assert len(loaded) == 0


def test_save_load_random(tmp_path):
    from recbayes.trajectories import load, save

    buffer = random_buffer(LABEL, 100, seed=1)
    save(buffer, tmp_path / "a.rbtj")
    loaded = load(tmp_path / "a.rbtj")
    assert loaded.label == LABEL
    assert all(a.equals(b) for a, b in zip(buffer.trajectories, loaded.trajectories))
    save(loaded, tmp_path / "b.rbtj")
    assert (tmp_path / "a.rbtj").read_bytes() == (tmp_path / "b.rbtj").read_bytes()


def test_load_bad_files(tmp_path):
    from recbayes.errors import BadMagicError, TruncatedFileError, UnsupportedVersionError
    from recbayes.trajectories import load, save

    save(random_buffer(LABEL, 3), tmp_path / "ok.rbtj")
    data = (tmp_path / "ok.rbtj").read_bytes()

    (tmp_path / "magic.rbtj").write_bytes(b"NOPE" + data[4:])
    with pytest.raises(BadMagicError):
        load(tmp_path / "magic.rbtj")

    (tmp_path / "version.rbtj").write_bytes(data[:4] + b"\x09" + data[5:])
    with pytest.raises(UnsupportedVersionError):
        load(tmp_path / "version.rbtj")

    (tmp_path / "cut.rbtj").write_bytes(data[:-7])
    with pytest.raises(TruncatedFileError):
        load(tmp_path / "cut.rbtj")


@pytest.mark.parametrize("strategy", [b"teammate_awarX", b"teammate_awar\xff"])
def test_load_bad_label(tmp_path, strategy: bytes):
    from recbayes.errors import FormatError
    from recbayes.trajectories import load, save

    save(random_buffer(LABEL, 2), tmp_path / "ok.rbtj")
    (tmp_path / "bad.rbtj").write_bytes((tmp_path / "ok.rbtj").read_bytes().replace(b"teammate_aware", strategy))
    with pytest.raises(FormatError, match="label"):
        load(tmp_path / "bad.rbtj")


def test_load_trailing_bytes(tmp_path):
    from recbayes.errors import FormatError
    from recbayes.trajectories import load, save

    save(random_buffer(LABEL, 2), tmp_path / "ok.rbtj")
    (tmp_path / "long.rbtj").write_bytes((tmp_path / "ok.rbtj").read_bytes() + b"\x00\x00")
    with pytest.raises(FormatError, match="trailing"):
        load(tmp_path / "long.rbtj")


@pytest.mark.parametrize("length", [3, 0])
def test_load_length_out_of_range(tmp_path, length: int):
    from recbayes.errors import MalformedRecordError
    from recbayes.trajectories import RECORD_DTYPE, Trajectory, TrajectoryBuffer, load, save

    rng = np.random.default_rng(0)
    trajectory = random_trajectory(rng, length) if length else Trajectory(np.zeros(0, dtype=RECORD_DTYPE))
    save(TrajectoryBuffer(label=LABEL, max_len=2, trajectories=[trajectory]), tmp_path / "bad.rbtj")
    with pytest.raises(MalformedRecordError, match="lengths"):
        load(tmp_path / "bad.rbtj")


@pytest.mark.parametrize("tail", [0x20, 0x40, 0x80, 0xE0])
def test_load_padding_bits_set(tmp_path, tail: int):
    from recbayes.errors import MalformedRecordError
    from recbayes.trajectories import TrajectoryBuffer, load, save

    trajectory = random_trajectory(np.random.default_rng(1), 3)
    trajectory.records["obs"][1, 15] |= tail
    save(TrajectoryBuffer(label=LABEL, max_len=4, trajectories=[trajectory]), tmp_path / "bad.rbtj")
    with pytest.raises(MalformedRecordError, match="padding"):
        load(tmp_path / "bad.rbtj")


def test_trajectory_observations_unpack():
    from recbayes.trajectories import collect

    buffer = collect(GridConfig.square(7), LABEL, n_trajectories=1, max_len=5, silent=True)
    obs = buffer.trajectories[0].observations()
    assert obs.shape == (len(buffer.trajectories[0]), 5, 5, 5)
    assert set(np.unique(obs).tolist()) <= {0, 1}


def test_observations_unpacked_once():
    from recbayes.gridworld import unpack_observation

    trajectory = random_trajectory(np.random.default_rng(5), 7)
    first = trajectory.observations()
    assert trajectory.observations() is first
    assert not first.flags.writeable
    for row, obs in zip(trajectory.packed_observations, first):
        assert np.array_equal(unpack_observation(row.tobytes()), obs)
