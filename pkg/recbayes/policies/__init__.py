from recbayes.policies.base import Policy, RandomPolicy, check_distribution, one_hot, random_policy, sample_action
from recbayes.policies.mixture import commit_action, mixture_action
from recbayes.policies.scripted import ScriptedPolicy, scripted_best_response
from recbayes.policies.tabular import QTable, TabularPolicy, table_key, tabular_learn

__all__ = [
    "Policy",
    "QTable",
    "RandomPolicy",
    "ScriptedPolicy",
    "TabularPolicy",
    "check_distribution",
    "commit_action",
    "mixture_action",
    "one_hot",
    "random_policy",
    "sample_action",
    "scripted_best_response",
    "table_key",
    "tabular_learn",
]
