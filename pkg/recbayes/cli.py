"""The `recbayes` command line: collect, train-classifier, train-policy, evaluate, report.

Experiment options come from an optional config file (`--config`) and are overridden by flags named
after the config keys, e.g. `recbayes evaluate --config lbf7.cfg --agent=random --trials=128`.
"""

from __future__ import annotations

from pathlib import Path

import fire

from recbayes import classifier, trajectories
from recbayes.config import ExperimentConfig, load_config
from recbayes.errors import ConfigError
from recbayes.format import format_mean_sd, format_optional, format_team_task, listing
from recbayes.harness import (
    build_report,
    check_manifest,
    collect_warnings,
    read_manifest,
    run_experiment,
    summarize,
)
from recbayes.policies import tabular_learn

WARN_LEVELS = ("ERROR", "WARNING")


def experiment_config(config: str | None = None, **overrides) -> ExperimentConfig:
    if config is not None:
        return load_config(config, **overrides)
    return ExperimentConfig().replace(**overrides)


def print_warnings(warnings: list[tuple[str, str]], warn_levels=WARN_LEVELS) -> None:
    for level, msg in warnings:
        if level in warn_levels:
            print(f"{level}: {msg}")


def collect(
    config: str | None = None,
    out: str = "data",
    t: int = 1000,
    l: int = 64,
    epsilon: float = 0.0,
    silent: bool = False,
    **overrides,
):
    """Collect labelled ad hoc trajectories of every team-task in the experiment set.

    Args:
        config: Experiment config file.
        out: Output directory, one `k{k}_{strategy}_{task}.rbtj` file per team-task.
        t: Episodes per team-task.
        l: Truncation length of every trajectory.
        epsilon: Uniform-action mixing rate of the behavior policy.
        silent: Hide progress bars.
    """
    exp = experiment_config(config, **overrides)
    team_tasks = exp.team_tasks()
    names = listing([f"{team_task:short}" for team_task in team_tasks], ", ", " and ")
    print(f"Collecting {t} trajectories of at most {l} steps for {names}")
    buffers = trajectories.collect_set(
        exp.grid(),
        team_tasks,
        n_trajectories=t,
        max_len=l,
        seed=exp.seed,
        epsilon=epsilon,
        workers=exp.workers,
        silent=silent,
    )
    Path(out).mkdir(parents=True, exist_ok=True)
    for buffer in buffers:
        path = Path(out) / f"{buffer.label.slug}.rbtj"
        trajectories.save(buffer, path)
        print(f"{format_team_task(buffer.label)}: {len(buffer)} trajectories, mean length "
              f"{sum(buffer.lengths) / max(1, len(buffer)):.1f} -> {path}")


def train_classifier(
    data: str = "data",
    out: str = "classifier.rbck",
    k: int | None = None,
    epochs: int = 50,
    lr: float = 1e-3,
    batch: int = 32,
    optimizer: str = "adam",
    seed: int = 0,
    split: tuple[float, float, float] = (0.8, 0.1, 0.1),
    metrics: str | None = None,
    silent: bool = False,
):
    """Train the recurrent team-task classifier on every `.rbtj` file of `data`.

    Args:
        data: Directory of collected trajectories.
        out: Checkpoint path.
        k: Number of team-tasks the data must cover, unchecked when omitted.
        epochs: Passes over the training split.
        lr: Optimizer step size.
        batch: Trajectories per mini-batch.
        optimizer: `adam` or `sgd`.
        seed: Seed of the split, the initialization and the mini-batch order.
        split: Train, validation and test fractions.
        metrics: Per-epoch metrics CSV, defaults to `{out stem}_metrics.csv`.
        silent: Hide progress bars and per-epoch lines.
    """
    paths = sorted(Path(data).glob("*.rbtj"))
    if not paths:
        print(f"No trajectory files in '{data}'")
        return
    buffers = [trajectories.load(path) for path in paths]
    dataset = trajectories.build_dataset(buffers, tuple(split), seed=seed)
    if k is not None and dataset.n_classes != k:
        raise ConfigError(f"Expected {k} team-tasks in '{data}', found {dataset.n_classes}")
    counts = dataset.counts()
    print(f"Training on {len(dataset.train)} trajectories of {dataset.n_classes} team-tasks "
          f"({sum(counts['validation'])} validation, {sum(counts['test'])} test)")

    train_config = classifier.TrainConfig(
        epochs=epochs, learning_rate=lr, batch_size=batch, seed=seed, optimizer=optimizer
    )
    metrics = metrics or str(Path(out).with_name(f"{Path(out).stem}_metrics.csv"))
    params = classifier.train(dataset, train_config, metrics_path=metrics, silent=silent)
    classifier.save_checkpoint(params, out)
    if dataset.test:
        loss, accuracy = classifier.evaluate(params, dataset.test)
        print(f"Test loss {loss:.4f}, final-step accuracy {accuracy:.3f}")
    print(f"Saved checkpoint to {out}, metrics to {metrics}")


def train_policy(
    config: str | None = None,
    out: str = "policies",
    episodes: int = 20000,
    learning_rate: float = 0.1,
    discount: float = 0.95,
    silent: bool = False,
    **overrides,
):
    """Learn a tabular best response to every team-task of the experiment set.

    Args:
        config: Experiment config file.
        out: Output directory of the `k{k}.rbqp` tables.
        episodes: Learning episodes per team-task.
        learning_rate: Q-learning step size.
        discount: Discount factor.
        silent: Hide progress bars.
    """
    exp = experiment_config(config, **overrides)
    Path(out).mkdir(parents=True, exist_ok=True)
    for team_task in exp.team_tasks():
        policy = tabular_learn(
            exp.grid(), team_task, episodes, learning_rate, discount, seed=exp.seed, silent=silent
        )
        path = Path(out) / f"k{team_task.k}.rbqp"
        policy.table.save(path)
        print(f"{format_team_task(team_task)}: {len(policy.table)} entries -> {path}")


def evaluate(
    config: str | None = None,
    out: str = "run",
    manifest: str | None = None,
    warn_levels: tuple[str, ...] = WARN_LEVELS,
    silent: bool = False,
    **overrides,
):
    """Run the replace-one-teammate trials and write a run directory.

    Args:
        config: Experiment config file.
        out: Run directory.
        manifest: Re-run the experiment recorded in this manifest (or run directory) and check that every
            artifact is reproduced byte-identically. `config` and overrides are ignored.
        warn_levels: Levels of warnings to show (ERROR, WARNING, INFO).
        silent: Hide progress bars.
    """
    recorded = None
    if manifest is not None:
        exp, recorded = read_manifest(manifest)
    else:
        exp = experiment_config(config, **overrides)
    print(f"Evaluating {exp.agent} on {exp.domain} {exp.size}x{exp.size}, {exp.experiment_set} set, "
          f"{exp.trials} trials per team-task")

    results = run_experiment(exp, out, silent=silent)
    warnings = collect_warnings(results)
    if recorded is not None:
        warnings += check_manifest(recorded, exp, out)
    print_warnings(warnings, warn_levels)

    for s in summarize(results):
        label = "All" if s.team_task is None else format_team_task(s.team_task)
        line = f"{label}: {format_mean_sd(s.mean_steps, s.sd_steps)} steps over {s.n} trials"
        if s.identified_rate is not None:
            line += f", identified {format_optional(s.identified_rate, '.0%')}"
            line += f", argmax locked at step {format_optional(s.mean_lock_step)}"
        print(line)
    print(f"Wrote run to {out}")


def report(*run_dirs: str, out: str = "report.csv", warn_levels: tuple[str, ...] = WARN_LEVELS):
    """Normalize the mean steps of several run directories against their Original and Random anchors.

    Args:
        run_dirs: Run directories written by `evaluate`.
        out: Report CSV.
        warn_levels: Levels of warnings to show.
    """
    warnings = build_report(run_dirs, out)
    print_warnings(warnings, warn_levels)
    print(f"Normalized {len(run_dirs)} runs -> {out}")


COMMANDS = {
    "collect": collect,
    "train-classifier": train_classifier,
    "train-policy": train_policy,
    "evaluate": evaluate,
    "report": report,
}


def main(command: list[str] | None = None):
    fire.Fire(COMMANDS, command=command)


if __name__ == "__main__":
    main()
