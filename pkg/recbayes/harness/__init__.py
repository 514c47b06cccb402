from recbayes.harness.agents import (
    AdHocAgent,
    ExactFilterAgent,
    ModelCache,
    OriginalTeammate,
    PolicyAgent,
    PolicyLibrary,
    RandomAgent,
    RecBayesAgent,
    ScriptedOracle,
    make_agent_factory,
)
from recbayes.harness.reporting import (
    CellSummary,
    Identification,
    NormalizedScore,
    argmax_lock_step,
    build_report,
    check_manifest,
    collect_warnings,
    emit_posterior_trace,
    identified_team_task,
    normalize,
    read_manifest,
    summarize,
    write_run,
)
from recbayes.harness.trials import TrialResult, run_experiment, run_trial, trial_seed

__all__ = [
    "AdHocAgent",
    "CellSummary",
    "ExactFilterAgent",
    "Identification",
    "ModelCache",
    "NormalizedScore",
    "OriginalTeammate",
    "PolicyAgent",
    "PolicyLibrary",
    "RandomAgent",
    "RecBayesAgent",
    "ScriptedOracle",
    "TrialResult",
    "argmax_lock_step",
    "build_report",
    "check_manifest",
    "collect_warnings",
    "emit_posterior_trace",
    "identified_team_task",
    "make_agent_factory",
    "normalize",
    "read_manifest",
    "run_experiment",
    "run_trial",
    "summarize",
    "trial_seed",
    "write_run",
]
