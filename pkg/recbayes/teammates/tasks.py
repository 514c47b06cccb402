"""Team strategies, approach-direction tasks and the team-task label sets."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from recbayes.errors import ConfigError
from recbayes.gridworld.state import Cell


class Direction(str, Enum):
    NORTH = "n"
    EAST = "e"
    SOUTH = "s"
    WEST = "w"

    @property
    def delta(self) -> Cell:
        return DIRECTION_DELTAS[self]


DIRECTION_DELTAS: dict[Direction, Cell] = {
    Direction.NORTH: (-1, 0),
    Direction.SOUTH: (1, 0),
    Direction.EAST: (0, 1),
    Direction.WEST: (0, -1),
}


class TeamStrategy(str, Enum):
    GREEDY = "greedy"
    TEAMMATE_AWARE = "teammate_aware"
    PROB_DEST = "prob_dest"

    def __str__(self) -> str:
        return self.value


FREE = "free"


@dataclass(frozen=True)
class TaskSpec:
    """Approach-direction assignment.

    Token `"nesw"` sends agent 0 to the north side of its target, agent 1 east, agent 2 south and
    agent 3 west. `None` is the Free task: every agent picks any adjacent cell.
    """

    assignment: tuple[Direction, ...] | None = None

    def __post_init__(self) -> None:
        if self.assignment is not None:
            assignment = tuple(Direction(d) for d in self.assignment)
            if sorted(assignment) != sorted(Direction):
                raise ConfigError(f"Task must assign each of the four sides exactly once, got {assignment}")
            object.__setattr__(self, "assignment", assignment)

    @classmethod
    def parse(cls, token: str) -> TaskSpec:
        token = token.strip().lower()
        if token == FREE:
            return cls(None)
        try:
            return cls(tuple(Direction(ch) for ch in token))
        except ValueError as e:
            raise ConfigError(f"Invalid task token '{token}'") from e

    @property
    def is_free(self) -> bool:
        return self.assignment is None

    @property
    def token(self) -> str:
        return FREE if self.assignment is None else "".join(d.value for d in self.assignment)

    def direction(self, agent_index: int) -> Direction | None:
        return None if self.assignment is None else self.assignment[agent_index]

    def __str__(self) -> str:
        return self.token


@dataclass(frozen=True)
class TeamTaskId:
    """A (strategy, task) pair labelled `k` within its experiment set (1-based)."""

    k: int
    strategy: TeamStrategy
    task: TaskSpec

    @property
    def index(self) -> int:
        """Zero-based class index used by the classifier and posteriors."""
        return self.k - 1

    @property
    def slug(self) -> str:
        return f"k{self.k}_{self.strategy.value}_{self.task.token}"

    def __format__(self, format_spec: str) -> str:
        if format_spec == "short":
            return f"{self.strategy.value}/{self.task.token}"
        return f"{self.k}: {self.strategy.value}/{self.task.token}"


class ExperimentSet(str, Enum):
    TEAM = "team"
    TASK = "task"
    BOTH = "both"

    def __str__(self) -> str:
        return self.value


ROTATION_TASKS = ("nesw", "eswn", "swne", "wnes")
TASK_TOKENS = (*ROTATION_TASKS, FREE)
STRATEGIES = (TeamStrategy.GREEDY, TeamStrategy.TEAMMATE_AWARE, TeamStrategy.PROB_DEST)

_SET_ALIASES = {
    "team": ExperimentSet.TEAM,
    "team_id": ExperimentSet.TEAM,
    "teamid": ExperimentSet.TEAM,
    "task": ExperimentSet.TASK,
    "task_id": ExperimentSet.TASK,
    "taskid": ExperimentSet.TASK,
    "both": ExperimentSet.BOTH,
    "task_team": ExperimentSet.BOTH,
    "taskandteamid": ExperimentSet.BOTH,
}


def parse_experiment_set(name: str | ExperimentSet) -> ExperimentSet:
    if isinstance(name, ExperimentSet):
        return name
    key = str(name).strip().lower().replace("-", "_").replace("&", "and")
    if key not in _SET_ALIASES:
        raise ConfigError(f"Unknown experiment set '{name}', expected one of {[s.value for s in ExperimentSet]}")
    return _SET_ALIASES[key]


def experiment_set(name: str | ExperimentSet) -> list[TeamTaskId]:
    """Ordered team-task labels of an experiment set.

    - team: the three strategies under the fixed task "nesw"
    - task: ProbDest under the four rotations and the Free task
    - both: the cross product, strategy-major
    """
    name = parse_experiment_set(name)
    if name == ExperimentSet.TEAM:
        pairs = [(strategy, "nesw") for strategy in STRATEGIES]
    elif name == ExperimentSet.TASK:
        pairs = [(TeamStrategy.PROB_DEST, token) for token in TASK_TOKENS]
    else:
        pairs = [(strategy, token) for strategy in STRATEGIES for token in TASK_TOKENS]
    return [TeamTaskId(k, strategy, TaskSpec.parse(token)) for k, (strategy, token) in enumerate(pairs, start=1)]
