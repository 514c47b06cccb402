"""Breadth-first path planning on the grid."""

from __future__ import annotations

from collections import deque
from collections.abc import Collection

import numpy as np

from recbayes.gridworld.state import MOVES, Action, Cell, shifted

UNREACHABLE = -1


def distance_map(height: int, width: int, goal: Cell, obstacles: Collection[Cell]) -> np.ndarray:
    """Shortest-path distance from every cell to `goal`, `UNREACHABLE` where blocked."""
    dist = np.full((height, width), UNREACHABLE, dtype=np.int64)
    if goal in obstacles:
        return dist
    dist[goal] = 0
    queue = deque([goal])
    while queue:
        cell = queue.popleft()
        for delta in MOVES.values():
            r, c = shifted(cell, delta)
            if 0 <= r < height and 0 <= c < width and dist[r, c] == UNREACHABLE and (r, c) not in obstacles:
                dist[r, c] = dist[cell] + 1
                queue.append((r, c))
    return dist


def path_length(height: int, width: int, start: Cell, goal: Cell, obstacles: Collection[Cell]) -> int | None:
    d = int(distance_map(height, width, goal, set(obstacles) - {start})[start])
    return None if d == UNREACHABLE else d


def first_step(
    height: int,
    width: int,
    start: Cell,
    goal: Cell,
    obstacles: Collection[Cell],
    rng: np.random.Generator | None = None,
) -> Action | None:
    """First move of a shortest obstacle-avoiding path.

    Args:
        height: Grid height.
        width: Grid width.
        start: Current cell. Never treated as an obstacle.
        goal: Destination cell.
        obstacles: Impassable cells.
        rng: Breaks ties between equally short first moves. Without it the first move in N, S, E, W order
            is taken.

    Returns:
        The move, NOOP when already at the goal, or None when no path exists.
    """
    if start == goal:
        return Action.NOOP
    dist = distance_map(height, width, goal, set(obstacles) - {start})
    if dist[start] == UNREACHABLE:
        return None
    candidates = []
    for action, delta in MOVES.items():
        r, c = shifted(start, delta)
        if 0 <= r < height and 0 <= c < width and dist[r, c] == dist[start] - 1:
            candidates.append(action)
    if rng is None or len(candidates) == 1:
        return candidates[0]
    return candidates[int(rng.integers(len(candidates)))]
