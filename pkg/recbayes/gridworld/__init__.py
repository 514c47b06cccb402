from recbayes.gridworld.domains import DomainRules, apply_lbf_interact, apply_pp_capture, domain_step, evade
from recbayes.gridworld.kernel import reset, resolve_moves, step
from recbayes.gridworld.observation import (
    OBS_SHAPE,
    PACKED_SIZE,
    Observation,
    observe,
    pack_observation,
    unpack_observation,
    unpack_observations,
)
from recbayes.gridworld.state import (
    EPISODE_CAP,
    FOV,
    MOVES,
    N_ACTIONS,
    Action,
    Cell,
    DomainKind,
    EnvState,
    GridConfig,
    manhattan,
)

__all__ = [
    "Action",
    "Cell",
    "DomainKind",
    "DomainRules",
    "EnvState",
    "EPISODE_CAP",
    "FOV",
    "GridConfig",
    "MOVES",
    "N_ACTIONS",
    "OBS_SHAPE",
    "Observation",
    "PACKED_SIZE",
    "apply_lbf_interact",
    "apply_pp_capture",
    "domain_step",
    "evade",
    "manhattan",
    "observe",
    "pack_observation",
    "reset",
    "resolve_moves",
    "step",
    "unpack_observation",
    "unpack_observations",
]
