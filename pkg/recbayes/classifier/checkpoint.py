"""Classifier checkpoints.

Layout (little-endian): magic "RBCK" | version u8 | K u32 | 8 architecture dims u32 |
every parameter in `PARAM_ORDER` as float64.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from recbayes.classifier.params import ARCHITECTURE, ClassifierParams, param_shapes
from recbayes.errors import BadMagicError, IncompatibleCheckpointError, TruncatedFileError, UnsupportedVersionError

MAGIC = b"RBCK"
VERSION = 1
_HEADER = struct.Struct(f"<4sBI{len(ARCHITECTURE)}I")


def save_checkpoint(params: ClassifierParams, path: str | Path) -> None:
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, params.n_classes, *ARCHITECTURE))
        for _, w in params.items():
            f.write(np.ascontiguousarray(w, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path, n_classes: int | None = None) -> ClassifierParams:
    """Read a checkpoint, checking it against the current architecture and, if given, `n_classes`."""
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"{path}: not a classifier checkpoint")
    if len(data) < _HEADER.size:
        raise TruncatedFileError(f"{path}: header is truncated")
    _, version, k, *dims = _HEADER.unpack_from(data)
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported checkpoint version {version}")
    if tuple(dims) != ARCHITECTURE:
        raise IncompatibleCheckpointError(f"{path}: architecture {tuple(dims)} differs from {ARCHITECTURE}")
    if n_classes is not None and k != n_classes:
        raise IncompatibleCheckpointError(f"{path}: checkpoint has K={k}, expected K={n_classes}")

    weights = {}
    offset = _HEADER.size
    for name, shape in param_shapes(k).items():
        count = int(np.prod(shape))
        if offset + 8 * count > len(data):
            raise TruncatedFileError(f"{path}: file ends inside parameter {name}")
        weights[name] = np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(shape).astype(np.float64)
        offset += 8 * count
    return ClassifierParams(k, weights)
