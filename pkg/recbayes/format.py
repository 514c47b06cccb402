"""String formatting utils."""

from __future__ import annotations

import math

from recbayes.teammates.tasks import TeamTaskId

strategy_names = {
    "greedy": "Greedy",
    "teammate_aware": "Teammate-Aware",
    "prob_dest": "ProbDest",
}


def format_team_task(team_task: TeamTaskId) -> str:
    task = "Free" if team_task.task.is_free else team_task.task.token.upper()
    return f"k={team_task.k} {strategy_names[team_task.strategy.value]} / {task}"


def listing(items: list[str], sep: str, final_sep: str, max_items: int = None) -> str:
    if len(items) == 0:
        return ""
    if len(items) == 1:
        return items[0]
    if max_items is None or len(items) <= max_items:
        return sep.join(items[:-1]) + final_sep + items[-1]
    else:
        return sep.join(items[:max_items] + ["..."])


def format_mean_sd(mean: float, sd: float) -> str:
    """Steps as reported in tables, e.g. `7.68 (± 5.06)`."""
    return f"{mean:.2f} (± {sd:.2f})"


def format_optional(value: float | None, spec: str = ".2f") -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return format(value, spec)
