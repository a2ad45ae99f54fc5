"""Temporal bandpass statistics: an orthonormal Haar filter bank applied
along time to groups of 8 consecutive frames, followed by the per-subband
statistical summary over two spatial scales.

The bank is the complete 8-point Haar basis (not a dyadic subset): one DC
row plus seven wavelets ordered coarse to fine, positions left to right
within a level. The frame-difference operator is the 2-tap special case.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import PreconditionError, ShapeError
from .nss import NSS34_DIM, nss34
from .resample import downscale_half

TEMPORAL_TAPS = 8
TEMPORAL_SUBBANDS = 7          # band 0 (DC) is dropped
TEMPORAL_SCALES = ("full", "half")
TEMPORAL_DIM = NSS34_DIM * TEMPORAL_SUBBANDS * len(TEMPORAL_SCALES)
assert TEMPORAL_DIM == 476


@dataclass(frozen=True)
class HaarBank:
    """Rows of the orthonormal Haar transform, DC first."""

    filters: np.ndarray

    @property
    def taps(self) -> int:
        return self.filters.shape[1]


def haar_basis(n_taps: int) -> np.ndarray:
    """Complete orthonormal Haar basis on ``n_taps = 2**m`` samples.

    Row 0 is the constant vector; wavelet rows follow with support halving
    level by level, each +1 on its first half and -1 on its second half
    before normalization.
    """
    if n_taps < 2 or n_taps & (n_taps - 1):
        raise PreconditionError(f"basis size {n_taps} is not a power of two")
    rows = [np.full(n_taps, 1.0 / np.sqrt(n_taps))]
    support = n_taps
    while support >= 2:
        amp = 1.0 / np.sqrt(support)
        for start in range(0, n_taps, support):
            row = np.zeros(n_taps)
            row[start: start + support // 2] = amp
            row[start + support // 2: start + support] = -amp
            rows.append(row)
        support //= 2
    basis = np.array(rows)
    basis.flags.writeable = False
    return basis


@lru_cache(maxsize=None)
def haar_bank(n_taps: int = TEMPORAL_TAPS) -> HaarBank:
    return HaarBank(haar_basis(n_taps))


def temporal_subbands(frames: Sequence[np.ndarray],
                      bank: HaarBank | None = None) -> list[np.ndarray]:
    """Project a group of frames onto the Haar bank, pixel by pixel.

    Accumulation runs tap by tap in a fixed order so results are identical
    no matter how callers parallelize around this function.
    """
    bank = bank or haar_bank()
    if len(frames) != bank.taps:
        raise ShapeError(f"need exactly {bank.taps} frames, got {len(frames)}")
    shape = np.asarray(frames[0]).shape
    planes = []
    for f in frames:
        f = np.asarray(f, dtype=np.float64)
        if f.shape != shape:
            raise ShapeError(f"frame geometry {f.shape} != {shape}")
        planes.append(f)
    out = []
    for k in range(bank.taps):
        acc = bank.filters[k, 0] * planes[0]
        for t in range(1, bank.taps):
            acc += bank.filters[k, t] * planes[t]
        out.append(acc)
    return out


def temporal_nss(subbands: Sequence[np.ndarray]) -> tuple[np.ndarray, tuple[str, ...]]:
    """476 statistics for one chunk: per scale (full, half) and per bandpass
    subband, the 34-feature summary of the normalized band. Returns the
    vector plus the names of any degenerate sub-fits."""
    if len(subbands) != TEMPORAL_SUBBANDS:
        raise ShapeError(
            f"need the {TEMPORAL_SUBBANDS} bandpass subbands, got {len(subbands)}"
        )
    values = np.empty(TEMPORAL_DIM, dtype=np.float64)
    degenerate: list[str] = []
    pos = 0
    for scale in TEMPORAL_SCALES:
        for k, band in enumerate(subbands, start=1):
            img = band if scale == "full" else downscale_half(band)
            res = nss34(img)
            values[pos: pos + NSS34_DIM] = res.values
            degenerate.extend(
                f"temporal/{scale}/band{k}/{slot}" for slot in res.degenerate
            )
            pos += NSS34_DIM
    return values, tuple(degenerate)


def temporal_feature_index(scale: str, subband: int, slot: int) -> int:
    """Flat index of (scale, subband 1..7, slot 0..33) in the 476 layout."""
    s = TEMPORAL_SCALES.index(scale)
    if not 1 <= subband <= TEMPORAL_SUBBANDS:
        raise ValueError(f"subband {subband} outside 1..{TEMPORAL_SUBBANDS}")
    if not 0 <= slot < NSS34_DIM:
        raise ValueError(f"slot {slot} outside 0..{NSS34_DIM - 1}")
    return (s * TEMPORAL_SUBBANDS + (subband - 1)) * NSS34_DIM + slot


def describe_temporal_feature(index: int) -> tuple[str, int, int]:
    """Inverse of :func:`temporal_feature_index`."""
    if not 0 <= index < TEMPORAL_DIM:
        raise ValueError(f"index {index} outside 0..{TEMPORAL_DIM - 1}")
    group, slot = divmod(index, NSS34_DIM)
    s, band = divmod(group, TEMPORAL_SUBBANDS)
    return TEMPORAL_SCALES[s], band + 1, slot
