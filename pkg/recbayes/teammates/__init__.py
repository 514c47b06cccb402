from recbayes.teammates.pathing import first_step, path_length
from recbayes.teammates.strategies import (
    Scene,
    destinations,
    greedy,
    prob_dest,
    strategy_action,
    team_act,
    teammate_aware,
)
from recbayes.teammates.tasks import (
    Direction,
    ExperimentSet,
    TaskSpec,
    TeamStrategy,
    TeamTaskId,
    experiment_set,
    parse_experiment_set,
)

__all__ = [
    "Direction",
    "ExperimentSet",
    "Scene",
    "TaskSpec",
    "TeamStrategy",
    "TeamTaskId",
    "destinations",
    "experiment_set",
    "first_step",
    "greedy",
    "parse_experiment_set",
    "path_length",
    "prob_dest",
    "strategy_action",
    "team_act",
    "teammate_aware",
]
