"""Binary trajectory files.

Layout (little-endian):

    magic "RBTJ" | version u8 |
    strategy length u8 | strategy token | task length u8 | task token |
    k u32 | max_len u32 | T u32 | T x length u32 |
    records, 21 bytes each: action u8 | packed observation 16 bytes | reward f32
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from recbayes.errors import (
    BadMagicError,
    FormatError,
    MalformedRecordError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from recbayes.gridworld.observation import OBS_BITS, PACKED_SIZE
from recbayes.gridworld.state import N_ACTIONS
from recbayes.teammates.tasks import TaskSpec, TeamStrategy, TeamTaskId
from recbayes.trajectories.collection import RECORD_DTYPE, Trajectory, TrajectoryBuffer

MAGIC = b"RBTJ"
VERSION = 1
TAIL_MASK = (0xFF << (OBS_BITS - 8 * (PACKED_SIZE - 1))) & 0xFF


def save(buffer: TrajectoryBuffer, path: str | Path) -> None:
    strategy = buffer.label.strategy.value.encode("ascii")
    task = buffer.label.task.token.encode("ascii")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<BB", VERSION, len(strategy)))
        f.write(strategy)
        f.write(struct.pack("<B", len(task)))
        f.write(task)
        f.write(struct.pack("<III", buffer.label.k, buffer.max_len, len(buffer.trajectories)))
        f.write(np.asarray(buffer.lengths, dtype="<u4").tobytes())
        for trajectory in buffer.trajectories:
            f.write(trajectory.records.astype(RECORD_DTYPE, copy=False).tobytes())


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.path = path
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.data):
            raise TruncatedFileError(f"{self.path}: file ends inside {what}")
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def _label(reader: _Reader, path) -> TeamTaskId:
    (n,) = reader.unpack("<B", "strategy length")
    strategy = reader.take(n, "strategy")
    (n,) = reader.unpack("<B", "task length")
    task = reader.take(n, "task")
    (k,) = reader.unpack("<I", "header")
    try:
        return TeamTaskId(k, TeamStrategy(strategy.decode("ascii")), TaskSpec.parse(task.decode("ascii")))
    except ValueError as e:
        raise FormatError(f"{path}: invalid team-task label ({e})") from e


def load(path: str | Path) -> TrajectoryBuffer:
    reader = _Reader(Path(path).read_bytes(), path)
    magic = reader.take(4, "magic")
    if magic != MAGIC:
        raise BadMagicError(f"{path}: not a trajectory file (magic {magic!r})")
    (version,) = reader.unpack("<B", "version")
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported trajectory file version {version}")
    label = _label(reader, path)
    max_len, count = reader.unpack("<II", "header")
    lengths = np.frombuffer(reader.take(4 * count, "length table"), dtype="<u4")
    if np.any((lengths < 1) | (lengths > max_len)):
        raise MalformedRecordError(f"{path}: trajectory lengths must lie in [1, {max_len}]")

    trajectories = []
    for length in lengths:
        records = np.frombuffer(reader.take(int(length) * RECORD_DTYPE.itemsize, "records"), dtype=RECORD_DTYPE)
        if np.any(records["action"] >= N_ACTIONS):
            raise MalformedRecordError(f"{path}: action byte out of range")
        if np.any(records["obs"][:, -1] & TAIL_MASK):
            raise MalformedRecordError(f"{path}: padding bits of a packed observation are set")
        trajectories.append(Trajectory(records.copy()))
    if reader.offset != len(reader.data):
        raise FormatError(f"{path}: {len(reader.data) - reader.offset} trailing bytes after the last trajectory")
    return TrajectoryBuffer(label=label, max_len=int(max_len), trajectories=trajectories)
