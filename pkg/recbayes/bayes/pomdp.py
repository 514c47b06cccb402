"""Tabular POMDP models and the exact multi-model Bayesian filter."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from recbayes.errors import ContractViolationError, DegenerateEvidenceError

ROW_TOLERANCE = 1e-12

Matrix = np.ndarray | sparse.csr_matrix


def _dense(matrix: Matrix) -> np.ndarray:
    return matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix)


def _row_sums(matrix: Matrix) -> np.ndarray:
    return np.asarray(matrix.sum(axis=1)).ravel()


def _column(matrix: Matrix, j: int) -> np.ndarray:
    if sparse.issparse(matrix):
        return matrix[:, [j]].toarray().ravel()
    return np.asarray(matrix)[:, j]


@dataclass
class TabularPOMDP:
    """One team-task as a POMDP over joint states.

    Args:
        transition: Per action, an (X, X) matrix with `transition[a][x, y] = P(y | x, a)`.
        observation: Per action, an (X, Z) matrix with `observation[a][y, z] = O(z | y, a)`.
        reward: (X, A) expected reward of the ad hoc agent.
        initial: Initial belief over the X states.
        states: Optional labels of the states, e.g. the enumerated `EnvState`s.
    """

    transition: Sequence[Matrix]
    observation: Sequence[Matrix]
    reward: np.ndarray
    initial: np.ndarray
    states: Sequence | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.reward = np.asarray(self.reward, dtype=np.float64)
        self.initial = np.asarray(self.initial, dtype=np.float64)
        x, a = self.reward.shape
        if len(self.transition) != a or len(self.observation) != a:
            raise ValueError(f"Expected {a} transition and observation matrices")
        if self.initial.shape != (x,) or np.any(self.initial < 0) or abs(self.initial.sum() - 1) > ROW_TOLERANCE:
            raise ValueError(f"Initial belief must be a simplex vector over {x} states")
        n_obs = self.observation[0].shape[1]
        for action in range(a):
            if self.transition[action].shape != (x, x):
                raise ValueError(f"Transition matrix of action {action} has shape {self.transition[action].shape}")
            if self.observation[action].shape != (x, n_obs):
                raise ValueError(f"Observation matrix of action {action} has shape {self.observation[action].shape}")
            for name, matrix in (("Transition", self.transition[action]), ("Observation", self.observation[action])):
                worst = float(np.max(np.abs(_row_sums(matrix) - 1.0)))
                if worst > ROW_TOLERANCE:
                    raise ValueError(f"{name} rows of action {action} deviate from 1 by {worst:.3g}")

    @classmethod
    def from_arrays(cls, P: np.ndarray, O: np.ndarray, r: np.ndarray, b0: np.ndarray) -> TabularPOMDP:  # noqa: N803
        """Build from dense `P[x, a, y]`, `O[y, a, z]`, `r[x, a]` and `b0[x]`."""
        P, O = np.asarray(P, dtype=np.float64), np.asarray(O, dtype=np.float64)  # noqa: N806
        return cls(
            transition=[P[:, a, :] for a in range(P.shape[1])],
            observation=[O[:, a, :] for a in range(O.shape[1])],
            reward=r,
            initial=b0,
        )

    @property
    def n_states(self) -> int:
        return len(self.initial)

    @property
    def n_actions(self) -> int:
        return self.reward.shape[1]

    @property
    def n_obs(self) -> int:
        return self.observation[0].shape[1]

    def step_matrix(self, action: int, obs: int) -> np.ndarray:
        """Dense (X, X) matrix of P(y | x, a) O(z | y, a)."""
        return _dense(self.transition[action]) * _column(self.observation[action], obs)[None, :]


def belief_update(model: TabularPOMDP, belief: np.ndarray, action: int, obs: int) -> tuple[np.ndarray | None, float]:
    """Condition `belief` on taking `action` and then observing `obs`.

    Returns:
        The new belief and the likelihood of `obs`. The belief is None when the likelihood is zero, i.e.
        the observation is impossible under `model`.
    """
    if not 0 <= action < model.n_actions or not 0 <= obs < model.n_obs:
        raise ValueError(f"Action {action} or observation {obs} out of range")
    predicted = model.transition[action].T @ belief
    joint = np.asarray(predicted).ravel() * _column(model.observation[action], obs)
    likelihood = float(joint.sum())
    if likelihood <= 0.0:
        return None, 0.0
    return joint / likelihood, likelihood


def posterior_update(
    models: Sequence[TabularPOMDP],
    beliefs: Sequence[np.ndarray],
    posterior: np.ndarray,
    action: int,
    obs: int,
    pi_prob: float = 1.0,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """One step of the multi-model filter.

    `pi_prob` is the probability the ad hoc policy gave to `action`. It multiplies every model's weight
    alike and so cancels in the normalization.

    Models whose likelihood is zero, or whose posterior already was zero, end with posterior zero and
    keep their belief unchanged.

    Raises:
        DegenerateEvidenceError: every model assigns the evidence zero probability.
    """
    if len(models) != len(beliefs) or len(models) != len(posterior):
        raise ContractViolationError(f"{len(models)} models, {len(beliefs)} beliefs, {len(posterior)} posteriors")
    if not 0.0 < pi_prob <= 1.0:
        raise ContractViolationError(f"pi_prob must lie in (0, 1], got {pi_prob}")

    weights = np.zeros(len(models))
    updated = []
    for k, (model, belief) in enumerate(zip(models, beliefs)):
        if posterior[k] <= 0.0:
            updated.append(belief)
            continue
        new, likelihood = belief_update(model, belief, action, obs)
        updated.append(belief if new is None else new)
        weights[k] = posterior[k] * likelihood * pi_prob
    total = weights.sum()
    if total <= 0.0:
        raise DegenerateEvidenceError(f"Action {action} followed by observation {obs} is impossible under all models")
    return weights / total, updated


def filter_posterior(
    models: Sequence[TabularPOMDP],
    history: Sequence[tuple[int, int]],
    prior: np.ndarray | None = None,
) -> np.ndarray:
    """Posterior after filtering a whole `(action, obs)` history from the initial beliefs."""
    posterior = np.full(len(models), 1 / len(models)) if prior is None else np.asarray(prior, dtype=np.float64)
    beliefs = [model.initial for model in models]
    for action, obs in history:
        posterior, beliefs = posterior_update(models, beliefs, posterior, action, obs)
    return posterior


def sequence_likelihood(model: TabularPOMDP, history: Sequence[tuple[int, int]]) -> float:
    """Probability of the observations in `history` summed over every state sequence explicitly."""
    joint = model.initial
    for action, obs in history:
        joint = joint[..., None] * model.step_matrix(action, obs)
    return float(joint.sum())


def brute_force_posterior(
    models: Sequence[TabularPOMDP],
    history: Sequence[tuple[int, int]],
    prior: np.ndarray | None = None,
) -> np.ndarray:
    """Reference posterior from exhaustive enumeration of state sequences. Exponential in the history length."""
    prior = np.full(len(models), 1 / len(models)) if prior is None else np.asarray(prior, dtype=np.float64)
    weights = prior * np.array([sequence_likelihood(model, history) for model in models])
    total = weights.sum()
    if total <= 0.0:
        raise DegenerateEvidenceError("History is impossible under all models")
    return weights / total


def dump_model(model: TabularPOMDP, path: str | Path) -> None:
    """Write every nonzero entry as one text row: `B x p`, `P a x y p`, `O a y z p` and `R x a r`."""
    with open(path, "w") as f:
        f.write(f"# states {model.n_states} actions {model.n_actions} observations {model.n_obs}\n")
        for x in np.flatnonzero(model.initial):
            f.write(f"B {x} {model.initial[x]!r}\n")
        for kind, matrices in (("P", model.transition), ("O", model.observation)):
            for a, matrix in enumerate(matrices):
                coo = sparse.coo_matrix(matrix)
                for i, j, p in sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())):
                    if p != 0.0:
                        f.write(f"{kind} {a} {i} {j} {p!r}\n")
        for x, a in zip(*np.nonzero(model.reward)):
            f.write(f"R {x} {a} {model.reward[x, a]!r}\n")
