"""Channelized field-of-view observations and their 16-byte packed form.

Channel map of the 5x5x5 observation (channel, row, col), centred on the observing agent:

- channels 0-2: the other agents, in increasing agent index (the observer is skipped)
- channel 3: live targets (food or prey)
- channel 4: cells outside the grid
"""

from __future__ import annotations

import numpy as np

from recbayes.errors import MalformedRecordError
from recbayes.gridworld.state import FOV, EnvState

Observation = np.ndarray

N_CHANNELS = 5
TARGET_CHANNEL = 3
WALL_CHANNEL = 4
OBS_SHAPE = (N_CHANNELS, FOV, FOV)
OBS_BITS = N_CHANNELS * FOV * FOV
PACKED_SIZE = (OBS_BITS + 7) // 8


def teammate_order(n_agents: int, agent_index: int) -> list[int]:
    """Agent index shown in each teammate channel of `agent_index`'s observation."""
    return [j for j in range(n_agents) if j != agent_index]


def observe(state: EnvState, agent_index: int) -> Observation:
    """Encode the field-of-view of one agent."""
    if not 0 <= agent_index < state.n_agents:
        raise IndexError(f"Agent index {agent_index} out of range for {state.n_agents} agents")
    half = FOV // 2
    row0, col0 = state.agent_positions[agent_index]
    obs = np.zeros(OBS_SHAPE, dtype=np.uint8)

    def window(cell):
        r, c = cell[0] - row0 + half, cell[1] - col0 + half
        return (r, c) if 0 <= r < FOV and 0 <= c < FOV else None

    for channel, j in enumerate(teammate_order(state.n_agents, agent_index)):
        if (w := window(state.agent_positions[j])) is not None:
            obs[channel, w[0], w[1]] = 1
    for i in state.live_targets():
        if (w := window(state.target_positions[i])) is not None:
            obs[TARGET_CHANNEL, w[0], w[1]] = 1

    rows = np.arange(FOV) + row0 - half
    cols = np.arange(FOV) + col0 - half
    outside_rows = (rows < 0) | (rows >= state.config.height)
    outside_cols = (cols < 0) | (cols >= state.config.width)
    obs[WALL_CHANNEL] = outside_rows[:, None] | outside_cols[None, :]
    return obs


def pack_observation(obs: Observation) -> bytes:
    """Pack to 16 bytes: flattened bit i goes to byte i // 8, bit i % 8 (least significant first)."""
    bits = np.asarray(obs, dtype=bool).reshape(-1)
    if bits.size != OBS_BITS:
        raise MalformedRecordError(f"Observation must have {OBS_BITS} bits, got {bits.size}")
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_observation(record: bytes | np.ndarray) -> Observation:
    """Exact inverse of `pack_observation`."""
    raw = np.frombuffer(bytes(record), dtype=np.uint8)
    if raw.size != PACKED_SIZE:
        raise MalformedRecordError(f"Packed observation must be {PACKED_SIZE} bytes, got {raw.size}")
    bits = np.unpackbits(raw, bitorder="little")
    if bits[OBS_BITS:].any():
        raise MalformedRecordError("Padding bits of packed observation are set")
    return bits[:OBS_BITS].reshape(OBS_SHAPE)


def unpack_observations(records: np.ndarray) -> np.ndarray:
    """Vectorized `unpack_observation` over a (T, 16) array of packed records, shape (T, 5, 5, 5)."""
    raw = np.asarray(records, dtype=np.uint8).reshape(-1, PACKED_SIZE)
    bits = np.unpackbits(raw, axis=1, bitorder="little")
    if bits[:, OBS_BITS:].any():
        raise MalformedRecordError("Padding bits of packed observation are set")
    return bits[:, :OBS_BITS].reshape(-1, *OBS_SHAPE)
