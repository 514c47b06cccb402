from recbayes.bayes.enumeration import (
    STATE_CAP,
    ModelSet,
    enumerate_model,
    enumerate_models,
    initial_distribution,
    team_action_distribution,
)
from recbayes.bayes.pomdp import (
    TabularPOMDP,
    belief_update,
    brute_force_posterior,
    dump_model,
    filter_posterior,
    posterior_update,
    sequence_likelihood,
)

__all__ = [
    "ModelSet",
    "STATE_CAP",
    "TabularPOMDP",
    "belief_update",
    "brute_force_posterior",
    "dump_model",
    "enumerate_model",
    "enumerate_models",
    "filter_posterior",
    "initial_distribution",
    "posterior_update",
    "sequence_likelihood",
    "team_action_distribution",
]
