"""Per-chunk feature extraction and pooling into the final video vector.

The video vector concatenates four blocks in a frozen order:

    [spatial averages | spatial absolute differences | temporal | deep]
         680                  680                        476      2048

Spatial block layout (680 = 34*2*4 + 34*1*12): full-scale luma maps
(Y, GM, LoG, DoG), half-scale luma maps, then the twelve chroma maps at
half scale only. Half scale means the frame itself is downscaled before
map construction.
"""

from __future__ import annotations

import json
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import pixel_maps
from .config import Config
from .deep_features import DEEP_DEFAULT_DIM, read_deep_features
from .errors import AlignmentError, PreconditionError, SidecarFormatError
from .nss import NSS34_DIM, NSS34_SLOTS, nss34
from .pixel_maps import (
    CHROMA_MAP_LABELS,
    LUMA_MAP_LABELS,
    build_all_maps,
    build_luma_maps,
    downscale_half_frame,
    luma,
    resize_keep_aspect,
)
from .temporal import TEMPORAL_DIM, temporal_nss, temporal_subbands
from .video_io import (
    ChunkSchedule,
    Frame,
    PixelFormat,
    VideoSource,
    frame_to_rgb_array,
)

SPATIAL_LUMA_SCALES = ("full", "half")
SPATIAL_DIM = NSS34_DIM * len(SPATIAL_LUMA_SCALES) * len(LUMA_MAP_LABELS) \
    + NSS34_DIM * len(CHROMA_MAP_LABELS)
SPATIAL_LUMA_DIM = NSS34_DIM * len(SPATIAL_LUMA_SCALES) * len(LUMA_MAP_LABELS)
VIDEO_DIM = 2 * SPATIAL_DIM + TEMPORAL_DIM + DEEP_DEFAULT_DIM

assert SPATIAL_LUMA_DIM == 272
assert SPATIAL_DIM == 680 and SPATIAL_LUMA_DIM + NSS34_DIM * 12 == SPATIAL_DIM
assert TEMPORAL_DIM == 476
assert VIDEO_DIM == 3884

STAGE_NAMES = ("spatial_nss", "spatial_nss_var", "temporal_nss", "deep_ingest")

FEATURE_MAGIC = b"FTV1"
_FEATURE_HEADER = struct.Struct("<4sI")


@dataclass(frozen=True)
class ChunkFeatures:
    """Raw per-chunk material prior to cross-chunk pooling."""

    spatial: tuple[np.ndarray, np.ndarray]   # one 680-vector per sampled frame
    temporal: np.ndarray                     # 476
    deep: np.ndarray                         # provider-dimension row
    degenerate: tuple[str, ...] = ()


@dataclass(frozen=True)
class VideoFeatureVector:
    spatial_avg: np.ndarray
    spatial_absdiff: np.ndarray
    temporal: np.ndarray
    deep: np.ndarray

    def __post_init__(self):
        if self.spatial_avg.shape != (SPATIAL_DIM,) or self.spatial_absdiff.shape != (SPATIAL_DIM,):
            raise PreconditionError("spatial blocks must be 680 wide")
        if self.temporal.shape != (TEMPORAL_DIM,):
            raise PreconditionError("temporal block must be 476 wide")

    @property
    def concatenated(self) -> np.ndarray:
        return np.concatenate(
            [self.spatial_avg, self.spatial_absdiff, self.temporal, self.deep]
        )

    def __len__(self) -> int:
        return 2 * SPATIAL_DIM + TEMPORAL_DIM + self.deep.shape[0]


# ---------------------------------------------------------------------------
# Layout bookkeeping
# ---------------------------------------------------------------------------


def spatial_feature_index(scale: str, map_label: str, slot: int) -> int:
    """Flat index of (scale, map, NSS slot) inside the 680-wide block."""
    if not 0 <= slot < NSS34_DIM:
        raise ValueError(f"slot {slot} outside 0..{NSS34_DIM - 1}")
    if map_label in LUMA_MAP_LABELS:
        s = SPATIAL_LUMA_SCALES.index(scale)
        group = s * len(LUMA_MAP_LABELS) + LUMA_MAP_LABELS.index(map_label)
    elif map_label in CHROMA_MAP_LABELS:
        if scale != "half":
            raise ValueError("chroma maps exist at half scale only")
        group = 2 * len(LUMA_MAP_LABELS) + CHROMA_MAP_LABELS.index(map_label)
    else:
        raise ValueError(f"unknown map label {map_label!r}")
    return group * NSS34_DIM + slot


def describe_spatial_feature(index: int) -> tuple[str, str, int]:
    """Inverse of :func:`spatial_feature_index`: (scale, map label, slot)."""
    if not 0 <= index < SPATIAL_DIM:
        raise ValueError(f"index {index} outside 0..{SPATIAL_DIM - 1}")
    group, slot = divmod(index, NSS34_DIM)
    if group < 2 * len(LUMA_MAP_LABELS):
        s, m = divmod(group, len(LUMA_MAP_LABELS))
        return SPATIAL_LUMA_SCALES[s], LUMA_MAP_LABELS[m], slot
    return "half", CHROMA_MAP_LABELS[group - 2 * len(LUMA_MAP_LABELS)], slot


def describe_feature(index: int, deep_dim: int = DEEP_DEFAULT_DIM) -> str:
    """Human-readable name for a flat index into the full video vector."""
    if index < SPATIAL_DIM:
        scale, label, slot = describe_spatial_feature(index)
        return f"spatial_avg/{scale}/{label}/{NSS34_SLOTS[slot]}"
    index -= SPATIAL_DIM
    if index < SPATIAL_DIM:
        scale, label, slot = describe_spatial_feature(index)
        return f"spatial_absdiff/{scale}/{label}/{NSS34_SLOTS[slot]}"
    index -= SPATIAL_DIM
    if index < TEMPORAL_DIM:
        from .temporal import describe_temporal_feature

        scale, band, slot = describe_temporal_feature(index)
        return f"temporal/{scale}/band{band}/{NSS34_SLOTS[slot]}"
    index -= TEMPORAL_DIM
    if index < deep_dim:
        return f"deep/{index}"
    raise ValueError("index beyond the video vector")


# ---------------------------------------------------------------------------
# Spatial path
# ---------------------------------------------------------------------------


def spatial_features(rgb: np.ndarray, config: Config = Config()) -> tuple[np.ndarray, tuple[str, ...]]:
    """680 statistics for one already-resized RGB frame."""
    kw = dict(c=config.mscn_c, half_window=config.mscn_half_window,
              window_sigma=config.mscn_window_sigma)
    values = np.empty(SPATIAL_DIM, dtype=np.float64)
    degenerate: list[str] = []
    pos = 0

    def consume(feature_map):
        nonlocal pos
        res = nss34(feature_map.data, **kw)
        values[pos: pos + NSS34_DIM] = res.values
        degenerate.extend(
            f"{feature_map.scale}/{feature_map.label}/{slot}" for slot in res.degenerate
        )
        pos += NSS34_DIM

    for fmap in build_luma_maps(rgb, "full"):
        consume(fmap)
    half_maps = build_all_maps(downscale_half_frame(rgb), "half")
    by_label = {m.label: m for m in half_maps}
    for label in LUMA_MAP_LABELS:
        consume(by_label[label])
    for label in CHROMA_MAP_LABELS:
        consume(by_label[label])
    return values, tuple(degenerate)


def pool_chunk_spatial(vectors: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Average and absolute-difference pooling of the two frame vectors."""
    if len(vectors) != 2:
        raise PreconditionError(f"chunk pooling needs exactly 2 vectors, got {len(vectors)}")
    a, b = (np.asarray(v, dtype=np.float64) for v in vectors)
    return (a + b) / 2.0, np.abs(a - b)


def assemble_video(chunks: Sequence[ChunkFeatures]) -> VideoFeatureVector:
    """Average each block across chunks and freeze the concatenation order."""
    if len(chunks) == 0:
        raise PreconditionError("need at least one chunk")
    avgs, diffs = zip(*(pool_chunk_spatial(c.spatial) for c in chunks))
    return VideoFeatureVector(
        spatial_avg=np.mean(avgs, axis=0),
        spatial_absdiff=np.mean(diffs, axis=0),
        temporal=np.mean([c.temporal for c in chunks], axis=0),
        deep=np.mean([c.deep for c in chunks], axis=0),
    )


# ---------------------------------------------------------------------------
# Whole-video extraction
# ---------------------------------------------------------------------------


class _StageClock:
    def __init__(self):
        self.totals = {name: 0.0 for name in STAGE_NAMES}

    def add(self, stage: str, seconds: float) -> None:
        self.totals[stage] += seconds


def _prep_rgb(frame: Frame, config: Config) -> np.ndarray:
    return resize_keep_aspect(frame_to_rgb_array(frame), config.resize_short_side)


def _prep_luma(frame: Frame, config: Config) -> np.ndarray:
    """Resized Y plane for the temporal stream.

    YUV sources hand their luma plane over directly; RGB sources derive it
    with the standard weights first.
    """
    if frame.pixel_format is PixelFormat.RGB24:
        y = luma(frame_to_rgb_array(frame))
    else:
        y = frame.planes[0].astype(np.float64)
    return resize_keep_aspect(y, config.resize_short_side)


def _chunk_task(ci: int,
                spatial_rgb: list[np.ndarray],
                temporal_luma: list[np.ndarray],
                deep_row: np.ndarray,
                config: Config) -> tuple[ChunkFeatures, dict[str, float]]:
    times = {}
    t0 = time.perf_counter()
    spat = [spatial_features(rgb, config) for rgb in spatial_rgb]
    times["spatial_nss"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bands = temporal_subbands(temporal_luma)
    tvec, tflags = temporal_nss(bands[1:])
    times["temporal_nss"] = time.perf_counter() - t0

    flags = tuple(
        f"chunk{ci}/spatial/frame{j}/{flag}" for j, (_, fl) in enumerate(spat) for flag in fl
    ) + tuple(f"chunk{ci}/{flag}" for flag in tflags)
    features = ChunkFeatures(
        spatial=(spat[0][0], spat[1][0]),
        temporal=tvec,
        deep=deep_row,
        degenerate=flags,
    )
    return features, times


def extract_video(video: VideoSource,
                  frames: Iterable[Frame],
                  schedule: ChunkSchedule,
                  deep: str | Path | np.ndarray | None = None,
                  config: Config = Config(),
                  no_deep: bool = False) -> tuple[VideoFeatureVector, dict]:
    """Run the three feature streams over a scheduled video.

    ``deep`` is a sidecar path or an already-loaded (chunks x dim) array and
    must align with the schedule; with ``no_deep`` the deep block is
    zero-filled and a warning is recorded. Per-stage wall-clock totals and
    degenerate-fit flags ride along in the metadata dict. Results are
    bit-identical for any thread count because chunks are reduced in
    schedule order.
    """
    n_chunks = len(schedule)
    warnings: list[str] = []
    clock = _StageClock()
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    if deep is None:
        if not no_deep:
            raise AlignmentError("no deep sidecar provided; pass no_deep to zero-fill")
        deep_rows = np.zeros((n_chunks, DEEP_DEFAULT_DIM))
        warnings.append("deep block zero-filled (no sidecar)")
    elif isinstance(deep, (str, Path)):
        deep_rows = read_deep_features(deep, expected_chunks=n_chunks)
    else:
        deep_rows = np.asarray(deep, dtype=np.float64)
        if deep_rows.shape[0] != n_chunks:
            raise AlignmentError(
                f"deep rows ({deep_rows.shape[0]}) != chunks ({n_chunks})"
            )
    clock.add("deep_ingest", time.perf_counter() - t0)

    # Which chunks consume each frame index, and in which role.
    spatial_needs: dict[int, list[int]] = {}
    temporal_needs: dict[int, list[int]] = {}
    for ci, plan in enumerate(schedule.chunks):
        for idx in plan.spatial_frame_indices:
            spatial_needs.setdefault(idx, []).append(ci)
        for idx in plan.temporal_frame_indices:
            temporal_needs.setdefault(idx, []).append(ci)
    last_needed = max(max(spatial_needs), max(temporal_needs))

    spatial_rgb: dict[int, list[np.ndarray | None]] = {
        ci: [None] * len(p.spatial_frame_indices) for ci, p in enumerate(schedule.chunks)
    }
    temporal_luma: dict[int, list[np.ndarray | None]] = {
        ci: [None] * len(p.temporal_frame_indices) for ci, p in enumerate(schedule.chunks)
    }

    threads = config.effective_threads
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    futures: dict[int, object] = {}
    results: dict[int, tuple[ChunkFeatures, dict[str, float]]] = {}
    ready = 0

    def launch_ready():
        nonlocal ready
        while ready < n_chunks:
            srgbs = spatial_rgb[ready]
            tlums = temporal_luma[ready]
            if any(v is None for v in srgbs) or any(v is None for v in tlums):
                return
            args = (ready, list(srgbs), list(tlums), deep_rows[ready], config)
            if executor is None:
                results[ready] = _chunk_task(*args)
            else:
                futures[ready] = executor.submit(_chunk_task, *args)
            spatial_rgb[ready] = []
            temporal_luma[ready] = []
            ready += 1

    try:
        for frame in frames:
            i = frame.index
            if i > last_needed:
                break
            if i in spatial_needs:
                t0 = time.perf_counter()
                rgb = _prep_rgb(frame, config)
                clock.add("spatial_nss", time.perf_counter() - t0)
                for ci in spatial_needs[i]:
                    plan = schedule.chunks[ci]
                    for j, idx in enumerate(plan.spatial_frame_indices):
                        if idx == i:
                            spatial_rgb[ci][j] = rgb
            if i in temporal_needs:
                t0 = time.perf_counter()
                lum = _prep_luma(frame, config)
                clock.add("temporal_nss", time.perf_counter() - t0)
                for ci in temporal_needs[i]:
                    plan = schedule.chunks[ci]
                    j = i - plan.temporal_frame_indices[0]
                    temporal_luma[ci][j] = lum
            launch_ready()
        launch_ready()
        if ready < n_chunks:
            raise PreconditionError(
                f"frame stream ended before chunk {ready} was complete"
            )
        for ci, fut in futures.items():
            results[ci] = fut.result()
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    t0 = time.perf_counter()
    chunk_features = []
    for ci in range(n_chunks):
        features, times = results[ci]
        for stage, dt in times.items():
            clock.add(stage, dt)
        chunk_features.append(features)
    vector = assemble_video(chunk_features)
    clock.add("spatial_nss_var", time.perf_counter() - t0)

    total = time.perf_counter() - t_start
    metadata = {
        "dim": len(vector),
        "blocks": {
            "spatial_avg": [0, SPATIAL_DIM],
            "spatial_absdiff": [SPATIAL_DIM, 2 * SPATIAL_DIM],
            "temporal": [2 * SPATIAL_DIM, 2 * SPATIAL_DIM + TEMPORAL_DIM],
            "deep": [2 * SPATIAL_DIM + TEMPORAL_DIM, len(vector)],
        },
        "source": {
            "width": video.width,
            "height": video.height,
            "frame_rate": str(video.frame_rate),
            "frame_count": video.frame_count,
            "pixel_format": video.pixel_format.value,
        },
        "chunks": n_chunks,
        "config": config.as_dict(),
        "kernels": {
            "log_window": pixel_maps.LOG_WINDOW,
            "log_sigma": pixel_maps.LOG_SIGMA,
            "dog_window": pixel_maps.DOG_WINDOW,
            "dog_sigma1": pixel_maps.DOG_SIGMA1,
            "dog_sigma2": pixel_maps.DOG_SIGMA2,
        },
        "timings_seconds": dict(clock.totals),
        "total_seconds": total,
        "degenerate_fits": [f for c in chunk_features for f in c.degenerate],
        "warnings": warnings,
    }
    return vector, metadata


# ---------------------------------------------------------------------------
# Feature file format
# ---------------------------------------------------------------------------


def write_features(path: str | Path, vector: np.ndarray, metadata: dict | None = None) -> None:
    """Write a feature vector as FTV1 (magic, u32 dim, float32 values) plus
    an optional JSON metadata sidecar next to it."""
    vec = np.ascontiguousarray(np.asarray(vector).ravel(), dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_FEATURE_HEADER.pack(FEATURE_MAGIC, vec.size))
        fh.write(vec.tobytes())
    if metadata is not None:
        Path(str(path) + ".meta.json").write_text(
            json.dumps(metadata, indent=2, sort_keys=True) + "\n"
        )


def read_features(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _FEATURE_HEADER.size:
        raise SidecarFormatError(f"{path}: too short for a header")
    magic, dim = _FEATURE_HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise SidecarFormatError(f"{path}: bad magic {magic!r}")
    if len(raw) != _FEATURE_HEADER.size + 4 * dim:
        raise SidecarFormatError(f"{path}: size disagrees with dim {dim}")
    return np.frombuffer(raw, dtype="<f4", offset=_FEATURE_HEADER.size).copy()
