"""Recurrent Bayesian classifier: conv encoder, GRU and MLP head over the team-task labels.

At step t the recurrent input is the latent of z_t concatenated with the one-hot of a_{t-1}; the
posterior p_t is the softmax of the head applied to the new hidden state. The prior p_0 is the head
applied to the zero hidden state.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax, softmax

from recbayes.classifier.layers import (
    encoder_backward,
    encoder_forward,
    gru_backward,
    gru_forward,
    head_backward,
    head_forward,
)
from recbayes.classifier.params import HIDDEN, LATENT, ClassifierParams
from recbayes.gridworld.observation import OBS_SHAPE, Observation
from recbayes.gridworld.state import N_ACTIONS, Action

NO_ACTION = -1


def action_one_hot(action: Action | int | None) -> np.ndarray:
    """One-hot of the previous action, all zeros when there is none."""
    v = np.zeros(N_ACTIONS)
    if action is not None and int(action) != NO_ACTION:
        v[int(action)] = 1.0
    return v


def encode(params: ClassifierParams, obs: Observation) -> np.ndarray:
    latent, _ = encoder_forward(params, np.asarray(obs, dtype=np.float64)[None])
    return latent[0]


def recurrent_step(
    params: ClassifierParams, hidden: np.ndarray, latent: np.ndarray, action_onehot: np.ndarray
) -> np.ndarray:
    x = np.concatenate([latent, action_onehot])[None]
    h, _ = gru_forward(params, x, np.asarray(hidden, dtype=np.float64)[None])
    return h[0]


def head_posterior(params: ClassifierParams, hidden: np.ndarray) -> np.ndarray:
    logits, _ = head_forward(params, np.asarray(hidden, dtype=np.float64)[None])
    return softmax(logits[0])


def initial_hidden() -> np.ndarray:
    return np.zeros(HIDDEN)


def prior(params: ClassifierParams) -> np.ndarray:
    """Posterior before any evidence: the head on the zero hidden state."""
    return head_posterior(params, initial_hidden())


def posterior_step(
    params: ClassifierParams, hidden: np.ndarray, a_prev: Action | int | None, obs: Observation
) -> tuple[np.ndarray, np.ndarray]:
    """Fold one (a_{t-1}, z_t) pair into the hidden state and return (posterior, new hidden)."""
    hidden = recurrent_step(params, hidden, encode(params, obs), action_one_hot(a_prev))
    return head_posterior(params, hidden), hidden


@dataclass
class Batch:
    """Padded mini-batch.

    Args:
        observations: (B, T, 5, 5, 5) observations z_1..z_T.
        actions: (B, T) previous actions, `NO_ACTION` where absent.
        lengths: (B,) true lengths.
        labels: (B,) zero-based class indices.
    """

    observations: np.ndarray
    actions: np.ndarray
    lengths: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_examples(cls, examples: Sequence[tuple[object, int]]) -> Batch:
        """Pad `(trajectory, label)` pairs to the longest trajectory."""
        lengths = np.array([len(trajectory) for trajectory, _ in examples])
        size = int(lengths.max())
        observations = np.zeros((len(examples), size, *OBS_SHAPE), dtype=np.uint8)
        actions = np.full((len(examples), size), NO_ACTION, dtype=np.int64)
        for b, (trajectory, _) in enumerate(examples):
            observations[b, : len(trajectory)] = trajectory.observations()
            actions[b, : len(trajectory)] = trajectory.actions
        return cls(observations, actions, lengths, np.array([label for _, label in examples]))

    @property
    def mask(self) -> np.ndarray:
        return np.arange(self.actions.shape[1])[None, :] < self.lengths[:, None]


def _forward(params: ClassifierParams, batch: Batch) -> tuple[np.ndarray, tuple]:
    n, size = batch.actions.shape
    latent, enc_cache = encoder_forward(params, batch.observations.reshape(n * size, *OBS_SHAPE).astype(np.float64))
    onehot = np.zeros((n, size, N_ACTIONS))
    b, t = np.nonzero(batch.actions >= 0)
    onehot[b, t, batch.actions[b, t]] = 1.0
    x = np.concatenate([latent.reshape(n, size, LATENT), onehot], axis=2)

    h = np.zeros((n, HIDDEN))
    hidden, gru_caches = [], []
    for step in range(size):
        h, cache = gru_forward(params, x[:, step], h)
        hidden.append(h)
        gru_caches.append(cache)
    logits, head_cache = head_forward(params, np.stack(hidden, axis=1).reshape(n * size, HIDDEN))
    log_probs = log_softmax(logits, axis=1).reshape(n, size, -1)
    return log_probs, (enc_cache, gru_caches, head_cache)


def filter_batch(params: ClassifierParams, batch: Batch) -> np.ndarray:
    """Posterior after every step, shape (B, T, K). Entries past a trajectory's length are padding."""
    log_probs, _ = _forward(params, batch)
    return np.exp(log_probs)


def filter_trajectory(params: ClassifierParams, trajectory) -> np.ndarray:
    """Posteriors p_1..p_T of one trajectory, shape (T, K)."""
    return filter_batch(params, Batch.from_examples([(trajectory, 0)]))[0]


def batch_loss(params: ClassifierParams, batch: Batch) -> tuple[float, dict[str, np.ndarray]]:
    """Cross-entropy averaged over the steps of each trajectory, then over the batch, with gradients.

    Padded steps carry zero weight.
    """
    n, size = batch.actions.shape
    log_probs, (enc_cache, gru_caches, head_cache) = _forward(params, batch)
    weights = batch.mask / batch.lengths[:, None] / n
    nll = -log_probs[np.arange(n), :, batch.labels]
    loss = float(np.sum(weights * nll))

    grads = params.zeros_like()
    dlogits = np.exp(log_probs)
    dlogits[np.arange(n), :, batch.labels] -= 1.0
    dlogits *= weights[:, :, None]
    dhidden = head_backward(dlogits.reshape(n * size, -1), head_cache, params, grads).reshape(n, size, HIDDEN)

    dx = np.zeros((n, size, LATENT + N_ACTIONS))
    dh = np.zeros((n, HIDDEN))
    for step in reversed(range(size)):
        dx[:, step], dh = gru_backward(dhidden[:, step] + dh, gru_caches[step], params, grads)
    encoder_backward(dx[:, :, :LATENT].reshape(n * size, LATENT), enc_cache, params, grads)
    return loss, grads


def sequence_loss(params: ClassifierParams, trajectory, label: int) -> tuple[float, dict[str, np.ndarray]]:
    """Mean per-step cross-entropy of one trajectory against zero-based class `label`, with gradients."""
    return batch_loss(params, Batch.from_examples([(trajectory, label)]))
