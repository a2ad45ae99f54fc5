"""Reader/writer for the binary sidecar carrying externally computed deep
feature vectors, one row per chunk, plus the cross-chunk pooling step.

Layout (little-endian throughout): 4-byte magic ``DFV1``, u32 row count,
u32 dimension, then count*dim float32 values row-major. The format is
dimension-agnostic so alternate backbones can ride the same rail; the
default provider emits 2048-wide rows.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import AlignmentError, DataError, PreconditionError, SidecarFormatError

DEEP_MAGIC = b"DFV1"
DEEP_DEFAULT_DIM = 2048
_HEADER = struct.Struct("<4sII")


def read_deep_features(path: str | Path, expected_chunks: int) -> np.ndarray:
    """Load per-chunk deep feature rows, checking alignment with the schedule."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SidecarFormatError(f"{path}: too short for a header")
    magic, count, dim = _HEADER.unpack_from(raw)
    if magic != DEEP_MAGIC:
        raise SidecarFormatError(f"{path}: bad magic {magic!r}, expected {DEEP_MAGIC!r}")
    expected_bytes = _HEADER.size + 4 * count * dim
    if len(raw) != expected_bytes:
        raise SidecarFormatError(
            f"{path}: payload is {len(raw)} bytes, header implies {expected_bytes}"
        )
    if count != expected_chunks:
        raise AlignmentError(
            f"{path}: sidecar has {count} rows but the schedule has "
            f"{expected_chunks} chunks"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(count, dim)
    if not np.isfinite(data).all():
        raise DataError(f"{path}: sidecar contains non-finite values")
    return data.astype(np.float64)


def write_deep_features(path: str | Path, rows: np.ndarray) -> None:
    rows = np.ascontiguousarray(rows, dtype="<f4")
    if rows.ndim != 2:
        raise PreconditionError("deep feature rows must be a 2D array")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(DEEP_MAGIC, rows.shape[0], rows.shape[1]))
        fh.write(rows.tobytes())


def pool_deep(per_chunk: np.ndarray) -> np.ndarray:
    """Average the per-chunk rows into one video-level vector."""
    per_chunk = np.asarray(per_chunk, dtype=np.float64)
    if per_chunk.ndim != 2 or per_chunk.shape[0] < 1:
        raise PreconditionError("need at least one chunk row to pool")
    return per_chunk.mean(axis=0)
