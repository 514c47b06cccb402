"""Statistics, normalized scores and the files of a run directory."""

from __future__ import annotations

import csv
import hashlib
import json
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from recbayes.config import AgentKind, ExperimentConfig, parse_config_stream
from recbayes.errors import ContractViolationError, UndefinedNormalizationError
from recbayes.format import format_team_task
from recbayes.harness import plotting
from recbayes.teammates.tasks import TeamTaskId

if TYPE_CHECKING:
    from recbayes.harness.trials import TrialResult

TRIALS_HEADER = ["k", "strategy", "task", "trial", "seed", "slot", "steps", "capped", "identified", "lock_step"]
SUMMARY_HEADER = ["k", "strategy", "task", "n", "mean_steps", "sd_steps", "identified_rate", "mean_lock_step"]
TRACE_HEADER = ["trial", "step", "k", "prob", "is_true"]
TRACE_MEAN_HEADER = ["step", "mean_true_prob", "mean_false_prob_sum"]
REPORT_HEADER = ["domain", "size", "set", "agent", "mean_steps", "original_mean", "random_mean", "normalized"]

MANIFEST = "manifest.json"
RUN_FILES = ("trials.csv", "summary.csv", "trace.csv", "trace_mean.csv", "trace.svg", "steps.svg")


@dataclass(frozen=True)
class NormalizedScore:
    """Performance between the Random Policy (0) and the Original Teammate (1). Fewer steps score higher."""

    value: float

    def __format__(self, format_spec: str) -> str:
        return format(self.value, format_spec or ".2f")


def normalize(agent_mean: float, original_mean: float, random_mean: float) -> NormalizedScore:
    """Normalize mean steps between the two anchors.

    Raises:
        UndefinedNormalizationError: the anchors coincide.
    """
    if random_mean == original_mean:
        raise UndefinedNormalizationError(f"Cannot normalize: original and random means are both {original_mean}")
    return NormalizedScore((random_mean - agent_mean) / (random_mean - original_mean))


@dataclass(frozen=True)
class Identification:
    """1-based team-task label of a posterior argmax, flagged when several labels share the maximum."""

    k: int
    tied: bool


def identified_team_task(trace: np.ndarray) -> Identification:
    """Argmax of the final posterior of a trace. Ties go to the lowest label."""
    trace = np.atleast_2d(np.asarray(trace, dtype=np.float64))
    if trace.shape[0] == 0 or trace.shape[1] == 0:
        raise ContractViolationError("Cannot identify a team-task from an empty trace")
    final = trace[-1]
    best = int(np.argmax(final))
    return Identification(best + 1, bool(np.count_nonzero(final == final[best]) > 1))


def argmax_lock_step(trace: np.ndarray, true_index: int) -> int | None:
    """First 1-based step from which the posterior argmax stays on `true_index`, None if it never settles there."""
    argmaxes = np.argmax(np.atleast_2d(trace), axis=1)
    wrong = np.flatnonzero(argmaxes != true_index)
    if len(wrong) == 0:
        return 1
    if wrong[-1] == len(argmaxes) - 1:
        return None
    return int(wrong[-1]) + 2


@dataclass
class CellSummary:
    """Statistics of one team-task, or of the whole run when `team_task` is None."""

    team_task: TeamTaskId | None
    n: int
    mean_steps: float
    sd_steps: float
    identified_rate: float | None = None
    mean_lock_step: float | None = None


def _summary(team_task: TeamTaskId | None, results: Sequence[TrialResult]) -> CellSummary:
    steps = np.array([r.steps for r in results], dtype=np.float64)
    traced = [r for r in results if r.trace is not None]
    identified_rate = mean_lock_step = None
    if traced:
        hits = [identified_team_task(r.trace).k == r.team_task.k for r in traced]
        identified_rate = float(np.mean(hits))
        locks = [argmax_lock_step(r.trace, r.team_task.index) for r in traced]
        locks = [lock for lock in locks if lock is not None]
        mean_lock_step = float(np.mean(locks)) if locks else None
    return CellSummary(
        team_task=team_task,
        n=len(results),
        mean_steps=float(steps.mean()),
        sd_steps=float(steps.std(ddof=1)) if len(steps) > 1 else 0.0,
        identified_rate=identified_rate,
        mean_lock_step=mean_lock_step,
    )


def summarize(results: Sequence[TrialResult]) -> list[CellSummary]:
    """Per team-task statistics in order of appearance, followed by the statistics of all trials."""
    cells: dict[TeamTaskId, list[TrialResult]] = {}
    for result in results:
        cells.setdefault(result.team_task, []).append(result)
    summaries = [_summary(team_task, cell) for team_task, cell in cells.items()]
    if results:
        summaries.append(_summary(None, results))
    return summaries


def collect_warnings(results: Sequence[TrialResult]) -> list[tuple[str, str]]:
    """Agent warnings of every trial plus argmax ties and capped trials, in trial order."""
    warnings = []
    for result in results:
        where = f"{result.team_task:short} trial {result.trial}"
        warnings.extend((level, f"{where}: {msg}") for level, msg in result.warnings)
        if result.capped:
            warnings.append(("INFO", f"{where}: capped at {result.steps} steps"))
        if result.trace is not None and identified_team_task(result.trace).tied:
            warnings.append(("WARNING", f"{where}: final posterior is tied, lowest label reported"))
    return warnings


def _number(value: float | int | None) -> str:
    if value is None:
        return ""
    return repr(float(value)) if isinstance(value, (float, np.floating)) else str(value)


def _label(team_task: TeamTaskId | None) -> list:
    if team_task is None:
        return ["all", "", ""]
    return [team_task.k, team_task.strategy.value, team_task.task.token]


def _open_csv(path: str | Path, header: Sequence[str]):
    f = open(path, "w", encoding="utf-8", newline="")
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(header)
    return f, writer


def write_trials_csv(results: Sequence[TrialResult], path: str | Path) -> None:
    f, writer = _open_csv(path, TRIALS_HEADER)
    with f:
        for r in results:
            identified = lock = None
            if r.trace is not None:
                identified = identified_team_task(r.trace).k
                lock = argmax_lock_step(r.trace, r.team_task.index)
            writer.writerow(
                _label(r.team_task)
                + [r.trial, r.seed, r.slot]
                + [r.steps, int(r.capped), _number(identified), _number(lock)]
            )


def write_summary_csv(summaries: Sequence[CellSummary], path: str | Path) -> None:
    f, writer = _open_csv(path, SUMMARY_HEADER)
    with f:
        for s in summaries:
            writer.writerow(
                _label(s.team_task)
                + [s.n, _number(s.mean_steps), _number(s.sd_steps)]
                + [_number(s.identified_rate), _number(s.mean_lock_step)]
            )


def trace_means(results: Sequence[TrialResult]) -> tuple[np.ndarray, np.ndarray]:
    """Per step, the mean true-team-task probability and the mean summed probability of the others.

    Each step averages over the trials that lasted at least that long.
    """
    traced = [r for r in results if r.trace is not None]
    length = max((len(r.trace) for r in traced), default=0)
    true_sum, false_sum, count = np.zeros(length), np.zeros(length), np.zeros(length)
    for r in traced:
        n = len(r.trace)
        true_prob = r.trace[:, r.team_task.index]
        true_sum[:n] += true_prob
        false_sum[:n] += r.trace.sum(axis=1) - true_prob
        count[:n] += 1
    return true_sum / np.maximum(count, 1), false_sum / np.maximum(count, 1)


def emit_posterior_trace(results: Sequence[TrialResult], path: str | Path, title: str = "") -> None:
    """Write the per-step posteriors of every traced trial to `path`.

    Alongside it, `{stem}_mean.csv` holds the per-step means and `{stem}.svg` plots them. Runs without
    traces give header-only files and an empty chart.
    """
    path = Path(path)
    f, writer = _open_csv(path, TRACE_HEADER)
    with f:
        for trial, r in enumerate(results):
            if r.trace is None:
                continue
            for step, posterior in enumerate(r.trace, start=1):
                for index, prob in enumerate(posterior):
                    writer.writerow([trial, step, index + 1, _number(prob), int(index == r.team_task.index)])

    true_prob, false_prob_sum = trace_means(results)
    f, writer = _open_csv(path.with_name(f"{path.stem}_mean.csv"), TRACE_MEAN_HEADER)
    with f:
        for step, (t, s) in enumerate(zip(true_prob, false_prob_sum), start=1):
            writer.writerow([step, _number(t), _number(s)])
    plotting.plot_posterior_trace(true_prob, false_prob_sum, path.with_suffix(".svg"), title)


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def input_hashes(config: ExperimentConfig) -> dict[str, str]:
    """SHA-256 of the classifier checkpoint and policy tables the configuration reads."""
    hashes = {}
    if config.checkpoint is not None and Path(config.checkpoint).is_file():
        hashes["checkpoint"] = file_sha256(config.checkpoint)
    if config.policy_dir is not None:
        for path in sorted(Path(config.policy_dir).glob("k*.rbqp")):
            hashes[f"policies/{path.name}"] = file_sha256(path)
    return hashes


def write_run(config: ExperimentConfig, results: Sequence[TrialResult], out_dir: str | Path) -> dict:
    """Write the run directory of an experiment and return its manifest.

    The manifest records the configuration, its hash, every trial seed and the SHA-256 of every input
    and output file. It holds no timestamps, so re-running a configuration rewrites it identically.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    title = f"{config.agent} on {config.domain} {config.size}x{config.size}, {config.experiment_set} set"

    summaries = summarize(results)
    write_trials_csv(results, out_dir / "trials.csv")
    write_summary_csv(summaries, out_dir / "summary.csv")
    emit_posterior_trace(results, out_dir / "trace.csv", title)
    cells = [s for s in summaries if s.team_task is not None]
    plotting.plot_steps(
        [format_team_task(s.team_task) for s in cells],
        [s.mean_steps for s in cells],
        [s.sd_steps for s in cells],
        out_dir / "steps.svg",
        title,
    )

    manifest = {
        "config": config.to_dict(),
        "config_sha256": config.digest(),
        "trial_seeds": [[r.team_task.k, r.trial, r.seed] for r in results],
        "inputs": input_hashes(config),
        "artifacts": {name: file_sha256(out_dir / name) for name in RUN_FILES},
    }
    with open(out_dir / MANIFEST, "w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def read_manifest(path: str | Path) -> tuple[ExperimentConfig, dict]:
    """Load a manifest, or the manifest of a run directory, and rebuild its configuration."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST
    with open(path, encoding="utf-8") as f:
        manifest = json.load(f)
    config = parse_config_stream(f"{key} = {value}" for key, value in manifest["config"].items())
    return config, manifest


def check_manifest(manifest: dict, config: ExperimentConfig, out_dir: str | Path) -> list[tuple[str, str]]:
    """Compare a re-run in `out_dir` against a recorded manifest."""
    warnings = []
    if config.digest() != manifest["config_sha256"]:
        warnings.append(("ERROR", "Configuration hash differs from the manifest"))
    current = input_hashes(config)
    for name, digest in manifest["inputs"].items():
        if current.get(name) != digest:
            warnings.append(("ERROR", f"Input {name} differs from the one recorded in the manifest"))
    for name, digest in manifest["artifacts"].items():
        path = Path(out_dir) / name
        if not path.is_file():
            warnings.append(("ERROR", f"Re-run did not produce {name}"))
        elif file_sha256(path) != digest:
            warnings.append(("ERROR", f"{name} is not byte-identical to the recorded run"))
    if not warnings:
        warnings.append(("INFO", f"All {len(manifest['artifacts'])} artifacts reproduced byte-identically"))
    return warnings


def _overall_mean(run_dir: Path) -> float:
    with open(run_dir / "summary.csv", encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            if row["k"] == "all":
                return float(row["mean_steps"])
    raise ValueError(f"{run_dir / 'summary.csv'} has no 'all' row")


def build_report(run_dirs: Sequence[str | Path], out_path: str | Path) -> list[tuple[str, str]]:
    """Normalize the mean steps of several runs and write them to `out_path`.

    Runs are grouped by domain, grid size and experiment set. Each group needs an `original` and a
    `random` run as anchors; runs of groups missing one are written without a score.
    """
    warnings = []
    runs = []
    for run_dir in run_dirs:
        config, _ = read_manifest(run_dir)
        runs.append((config, _overall_mean(Path(run_dir))))

    anchors: dict[tuple, dict[AgentKind, float]] = {}
    for config, mean in runs:
        if config.agent in (AgentKind.ORIGINAL, AgentKind.RANDOM):
            group = anchors.setdefault((config.domain, config.size, config.experiment_set), {})
            if config.agent in group:
                warnings.append(
                    ("WARNING", f"Several {config.agent} runs for {config.domain}{config.size}, using the first")
                )
                continue
            group[config.agent] = mean

    f, writer = _open_csv(out_path, REPORT_HEADER)
    with f:
        for config, mean in runs:
            group = anchors.get((config.domain, config.size, config.experiment_set), {})
            original, random = group.get(AgentKind.ORIGINAL), group.get(AgentKind.RANDOM)
            score = None
            if original is None or random is None:
                warnings.append(
                    ("WARNING", f"No anchors for {config.domain}{config.size} {config.experiment_set}, not normalized")
                )
            else:
                try:
                    score = normalize(mean, original, random).value
                except UndefinedNormalizationError as e:
                    warnings.append(("ERROR", str(e)))
            writer.writerow(
                [config.domain, config.size, config.experiment_set, config.agent, _number(mean)]
                + [_number(original), _number(random), _number(score)]
            )
    return warnings
