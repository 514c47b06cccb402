"""Core gridworld types shared by the kernel, the domain rules and the observation encoder."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum, IntEnum

from recbayes.errors import ConfigError

Cell = tuple[int, int]

FOV = 5
EPISODE_CAP = 512
MAX_AGENTS = 4


class DomainKind(str, Enum):
    """Which rule set runs on top of the kernel."""

    LBF = "lbf"
    PP = "pp"

    def __str__(self) -> str:
        return self.value


class Action(IntEnum):
    """Ad hoc and teammate action space, serialized as a single byte."""

    NOOP = 0
    NORTH = 1
    SOUTH = 2
    EAST = 3
    WEST = 4
    INTERACT = 5


N_ACTIONS = len(Action)

# Row/column deltas of the four moves, in the fixed tie-breaking order N, S, E, W.
MOVES: dict[Action, Cell] = {
    Action.NORTH: (-1, 0),
    Action.SOUTH: (1, 0),
    Action.EAST: (0, 1),
    Action.WEST: (0, -1),
}

DEFAULT_TARGETS = {DomainKind.LBF: 2, DomainKind.PP: 1}


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def chebyshev(a: Cell, b: Cell) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def shifted(cell: Cell, delta: Cell) -> Cell:
    return cell[0] + delta[0], cell[1] + delta[1]


@dataclass(frozen=True)
class GridConfig:
    """Static description of an episode family.

    Args:
        width: Grid width in cells.
        height: Grid height in cells.
        n_agents: Team size including the ad hoc slot.
        n_targets: Number of foods (LBF) or prey (PP). Defaults per domain.
        fov: Side of the square field-of-view. Fixed at 5.
        domain_kind: Rule set.
        seed: Default seed used by `reset` when none is passed.
        capture_requirement: Adjacent predators needed to capture a prey.
        allow_small: Permit grids smaller than the field-of-view (enumeration-scale instances).
    """

    width: int = 7
    height: int = 7
    n_agents: int = 4
    n_targets: int | None = None
    fov: int = FOV
    domain_kind: DomainKind = DomainKind.LBF
    seed: int = 0
    capture_requirement: int = 2
    allow_small: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain_kind", DomainKind(self.domain_kind))
        if self.n_targets is None:
            object.__setattr__(self, "n_targets", DEFAULT_TARGETS[self.domain_kind])
        if self.fov != FOV:
            raise ConfigError(f"Field-of-view is fixed at {FOV}, got {self.fov}")
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"Invalid grid size {self.width}x{self.height}")
        if not self.allow_small and (self.width < self.fov or self.height < self.fov):
            raise ConfigError(
                f"Grid {self.width}x{self.height} is smaller than the {self.fov}x{self.fov} field-of-view"
            )
        if not 2 <= self.n_agents <= MAX_AGENTS:
            raise ConfigError(f"Team size must be between 2 and {MAX_AGENTS}, got {self.n_agents}")
        if self.n_targets < 1:
            raise ConfigError(f"Need at least one target, got {self.n_targets}")
        if not 1 <= self.capture_requirement <= 4:
            raise ConfigError(f"Capture requirement must be in 1..4, got {self.capture_requirement}")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def square(cls, size: int, domain_kind: DomainKind | str = DomainKind.LBF, **kwargs) -> GridConfig:
        return cls(width=size, height=size, domain_kind=DomainKind(domain_kind), **kwargs)

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def cells(self) -> list[Cell]:
        """All cells in row-major order."""
        return [(r, c) for r in range(self.height) for c in range(self.width)]

    def interior_cells(self) -> list[Cell]:
        """Cells whose four neighbours are all in bounds, row-major."""
        return [(r, c) for r in range(1, self.height - 1) for c in range(1, self.width - 1)]


@dataclass(frozen=True)
class EnvState:
    """Full joint state of an episode.

    `target_alive` flags which targets are still on the field; in Predator-Prey these are the prey
    flags, in Level-Based Foraging a food turns dead once loaded. Levels are empty tuples in
    Predator-Prey.
    """

    config: GridConfig
    agent_positions: tuple[Cell, ...]
    target_positions: tuple[Cell, ...]
    target_alive: tuple[bool, ...]
    agent_levels: tuple[int, ...] = ()
    target_levels: tuple[int, ...] = ()
    t: int = 0

    @property
    def prey_alive(self) -> tuple[bool, ...]:
        return self.target_alive

    @property
    def n_agents(self) -> int:
        return len(self.agent_positions)

    @property
    def done(self) -> bool:
        return not any(self.target_alive)

    def live_targets(self) -> list[int]:
        return [i for i, alive in enumerate(self.target_alive) if alive]

    def live_target_cells(self) -> set[Cell]:
        return {self.target_positions[i] for i in self.live_targets()}

    def occupied(self) -> set[Cell]:
        return set(self.agent_positions) | self.live_target_cells()

    def replace(self, **changes) -> EnvState:
        return dataclasses.replace(self, **changes)

    def validate(self) -> None:
        """Check the occupancy invariants, raising `ValueError` on violation."""
        config = self.config
        if len(self.agent_positions) != config.n_agents:
            raise ValueError(f"Expected {config.n_agents} agents, got {len(self.agent_positions)}")
        if len(self.target_positions) != len(self.target_alive):
            raise ValueError("Target positions and alive flags differ in length")
        for cell in self.agent_positions:
            if not config.in_bounds(cell):
                raise ValueError(f"Agent at {cell} is out of bounds")
        if len(set(self.agent_positions)) != len(self.agent_positions):
            raise ValueError(f"Agents share a cell: {self.agent_positions}")
        if set(self.agent_positions) & self.live_target_cells():
            raise ValueError("An agent shares a cell with a live target")
        if self.t < 0:
            raise ValueError(f"Negative step counter {self.t}")
