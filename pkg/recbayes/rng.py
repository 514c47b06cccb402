"""Counter-based random streams.

Every random draw in recbayes comes from a `numpy.random.Philox` generator whose key and counter are
derived from explicit coordinates `(seed, purpose, episode, step)`. Any draw can therefore be
reproduced in isolation, which keeps collection and evaluation reproducible when parallelized.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

MASK64 = (1 << 64) - 1


class Purpose(IntEnum):
    """Separates independent random streams that share a seed."""

    PLACEMENT = 0
    LEVELS = 1
    TEAM = 2
    ADHOC = 3
    SLOT = 4
    TRIAL = 5
    SHUFFLE = 6
    INIT = 7
    LEARN = 8


def stream(seed: int, purpose: Purpose | int = 0, episode: int = 0, step: int = 0) -> np.random.Generator:
    """Generator for one `(seed, purpose, episode, step)` coordinate.

    The seed and purpose form the 128-bit Philox key; episode and step occupy the two high words of the
    256-bit counter, leaving the low words for the draws themselves.
    """
    key = (int(seed) & MASK64) | ((int(purpose) & MASK64) << 64)
    counter = ((int(episode) & MASK64) << 128) | ((int(step) & MASK64) << 192)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def derive_seed(seed: int, purpose: Purpose | int, episode: int = 0, step: int = 0) -> int:
    """Draw a fresh 63-bit seed from a coordinate."""
    return int(stream(seed, purpose, episode, step).integers(0, 1 << 63))
