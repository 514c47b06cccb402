"""The policy contract shared by every ad hoc behavior."""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from recbayes.errors import ContractViolationError
from recbayes.gridworld.observation import Observation
from recbayes.gridworld.state import N_ACTIONS, Action

SIMPLEX_ATOL = 1e-6


def one_hot(action: Action | int) -> np.ndarray:
    dist = np.zeros(N_ACTIONS)
    dist[int(action)] = 1.0
    return dist


def check_distribution(distribution: np.ndarray) -> np.ndarray:
    """Validate a probability vector over the action space."""
    distribution = np.asarray(distribution, dtype=np.float64)
    if distribution.shape != (N_ACTIONS,):
        raise ContractViolationError(f"Expected {N_ACTIONS} action probabilities, got shape {distribution.shape}")
    if not np.all(np.isfinite(distribution)) or np.any(distribution < -SIMPLEX_ATOL):
        raise ContractViolationError(f"Action distribution has invalid entries: {distribution}")
    if abs(distribution.sum() - 1.0) > SIMPLEX_ATOL:
        raise ContractViolationError(f"Action distribution sums to {distribution.sum()}, not 1")
    return distribution


def sample_action(distribution: np.ndarray, rng: np.random.Generator) -> Action:
    """Draw an action by inverting the cumulative distribution with one uniform draw."""
    distribution = check_distribution(distribution)
    cdf = np.cumsum(np.clip(distribution, 0.0, None))
    u = rng.random() * cdf[-1]
    return Action(min(int(np.searchsorted(cdf, u, side="right")), N_ACTIONS - 1))


class Policy(ABC):
    """Ad hoc policy over the 5x5x5 observation.

    `act` returns a distribution over the six actions and advances any internal memory with the
    observation; `commit` tells the policy which action was actually executed.
    """

    kind = "policy"

    def reset(self, agent_index: int) -> None:
        self.agent_index = agent_index

    @abstractmethod
    def act(self, obs: Observation) -> np.ndarray:
        ...

    def commit(self, action: Action | int) -> None:
        pass


class RandomPolicy(Policy):
    kind = "random"

    def act(self, obs: Observation) -> np.ndarray:
        return np.full(N_ACTIONS, 1.0 / N_ACTIONS)


def random_policy() -> RandomPolicy:
    return RandomPolicy()
