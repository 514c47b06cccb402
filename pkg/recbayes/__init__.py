from recbayes.config import AgentKind, ExperimentConfig, load_config, parse_config
from recbayes.harness import normalize, run_experiment, run_trial

__all__ = [
    "AgentKind",
    "ExperimentConfig",
    "load_config",
    "normalize",
    "parse_config",
    "run_experiment",
    "run_trial",
]
