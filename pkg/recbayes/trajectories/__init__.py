from recbayes.trajectories.collection import (
    RECORD_DTYPE,
    Trajectory,
    TrajectoryBuffer,
    collect,
    collect_set,
    replay_episode,
    run_adhoc_episode,
)
from recbayes.trajectories.dataset import LabelledDataset, build_dataset, split_sizes
from recbayes.trajectories.storage import load, save

__all__ = [
    "LabelledDataset",
    "RECORD_DTYPE",
    "Trajectory",
    "TrajectoryBuffer",
    "build_dataset",
    "collect",
    "collect_set",
    "load",
    "replay_episode",
    "run_adhoc_episode",
    "save",
    "split_sizes",
]
