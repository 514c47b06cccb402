from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from recbayes.errors import ContractViolationError
from recbayes.gridworld.observation import Observation
from recbayes.gridworld.state import Action
from recbayes.policies.base import Policy, check_distribution


def mixture_action(policies: Sequence[Policy], posterior: np.ndarray, obs: Observation) -> np.ndarray:
    """Posterior-weighted mixture of every library policy's action distribution.

    Every policy sees the observation, so each keeps its memory current even while its weight is zero.
    """
    posterior = np.asarray(posterior, dtype=np.float64)
    if posterior.shape != (len(policies),):
        raise ContractViolationError(f"Posterior over {posterior.shape} classes for {len(policies)} policies")
    if np.any(posterior < 0) or abs(posterior.sum() - 1.0) > 1e-6:
        raise ContractViolationError(f"Posterior is not a distribution: {posterior}")
    dists = np.stack([check_distribution(policy.act(obs)) for policy in policies])
    return posterior @ dists


def commit_action(policies: Sequence[Policy], action: Action | int) -> None:
    for policy in policies:
        policy.commit(action)
