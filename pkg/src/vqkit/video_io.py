"""Video input: YUV4MPEG2 and raw planar YUV readers, color conversion,
and the per-second chunk sampling schedule.

Frames are handed downstream as read-only float32 planes in [0, 255] so that
re-encoding a parsed stream reproduces it bit for bit.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np

from .errors import (
    GeometryError,
    StreamParseError,
    TooShortError,
    TruncatedStreamError,
    UnsupportedFormatError,
)

Y4M_MAGIC = b"YUV4MPEG2"

# BT.601 full-range luma weights; chroma expansion follows from them.
_KR, _KG, _KB = 0.299, 0.587, 0.114


class PixelFormat(Enum):
    YUV420_8BIT = "yuv420"
    YUV444_8BIT = "yuv444"
    RGB24 = "rgb24"


@dataclass(frozen=True)
class VideoSource:
    """Geometry and timing metadata for one video stream."""

    width: int
    height: int
    frame_rate: Fraction
    frame_count: int
    pixel_format: PixelFormat

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise GeometryError(
                f"frame geometry {self.width}x{self.height} below 64x64 minimum"
            )
        if self.frame_rate <= 0:
            raise GeometryError(f"frame rate {self.frame_rate} must be positive")
        if self.frame_count < 1:
            raise GeometryError("stream contains no frames")

    @property
    def duration_seconds(self) -> Fraction:
        return Fraction(self.frame_count) / self.frame_rate


@dataclass(frozen=True)
class Frame:
    """One decoded frame: planar float32 data in [0, 255], immutable."""

    index: int
    pixel_format: PixelFormat
    planes: tuple[np.ndarray, ...]

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]


@dataclass(frozen=True)
class ChunkPlan:
    """Frame indices sampled from one one-second window."""

    start: int
    length: int
    spatial_frame_indices: tuple[int, int]
    temporal_frame_indices: tuple[int, ...]
    cnn_frame_index: int


@dataclass(frozen=True)
class ChunkSchedule:
    chunks: tuple[ChunkPlan, ...]

    def __len__(self) -> int:
        return len(self.chunks)

    def frame_indices_used(self) -> list[int]:
        """Sorted union of all frame indices any stream will read."""
        used: set[int] = set()
        for c in self.chunks:
            used.update(c.spatial_frame_indices)
            used.update(c.temporal_frame_indices)
            used.add(c.cnn_frame_index)
        return sorted(used)


def _plane_shapes(fmt: PixelFormat, width: int, height: int) -> tuple[tuple[int, int], ...]:
    if fmt is PixelFormat.YUV420_8BIT:
        return ((height, width), (height // 2, width // 2), (height // 2, width // 2))
    if fmt is PixelFormat.YUV444_8BIT:
        return ((height, width), (height, width), (height, width))
    if fmt is PixelFormat.RGB24:
        return ((height, width), (height, width), (height, width))
    raise UnsupportedFormatError(f"no plane layout for {fmt}")


def frame_byte_size(fmt: PixelFormat, width: int, height: int) -> int:
    return sum(h * w for h, w in _plane_shapes(fmt, width, height))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _decode_planes(
    payload: bytes, fmt: PixelFormat, width: int, height: int, index: int
) -> tuple[np.ndarray, ...]:
    shapes = _plane_shapes(fmt, width, height)
    planes = []
    pos = 0
    for h, w in shapes:
        n = h * w
        raw = np.frombuffer(payload, dtype=np.uint8, count=n, offset=pos)
        planes.append(_freeze(raw.astype(np.float32).reshape(h, w)))
        pos += n
    return tuple(planes)


# ---------------------------------------------------------------------------
# YUV4MPEG2
# ---------------------------------------------------------------------------

_Y4M_COLORSPACES = {
    b"420": PixelFormat.YUV420_8BIT,
    b"420jpeg": PixelFormat.YUV420_8BIT,
    b"420mpeg2": PixelFormat.YUV420_8BIT,
    b"420paldv": PixelFormat.YUV420_8BIT,
    b"444": PixelFormat.YUV444_8BIT,
}


def _as_seekable(source: bytes | str | Path | BinaryIO) -> BinaryIO:
    if isinstance(source, (str, Path)):
        return open(source, "rb")
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(bytes(source))
    if not source.seekable():
        return io.BytesIO(source.read())
    return source


def _read_line(stream: BinaryIO, offset: int, what: str) -> bytes:
    """Read up to a newline; lines in Y4M are short, so cap the scan."""
    chunk = stream.read(256)
    nl = chunk.find(b"\n")
    if nl < 0:
        raise StreamParseError(f"unterminated {what} line", offset=offset)
    stream.seek(offset + nl + 1)
    return chunk[:nl]


def parse_y4m(source: bytes | str | Path | BinaryIO) -> tuple[VideoSource, Iterator[Frame]]:
    """Parse a YUV4MPEG2 stream.

    Returns the stream metadata plus a lazy iterator over decoded frames in
    display order. The whole stream is scanned once up front to establish the
    frame count and to surface truncation errors eagerly.
    """
    stream = _as_seekable(source)
    header = _read_line(stream, 0, "stream header")
    tokens = header.split(b" ")
    if tokens[0] != Y4M_MAGIC:
        raise StreamParseError(
            f"bad magic {tokens[0][:16]!r}, expected {Y4M_MAGIC!r}", offset=0
        )

    width = height = None
    rate = None
    colorspace = b"420"
    for tok in tokens[1:]:
        if not tok:
            continue
        key, val = tok[:1], tok[1:]
        try:
            if key == b"W":
                width = int(val)
            elif key == b"H":
                height = int(val)
            elif key == b"F":
                num, den = val.split(b":")
                rate = Fraction(int(num), int(den))
            elif key == b"C":
                colorspace = val
        except (ValueError, ZeroDivisionError) as exc:
            raise StreamParseError(f"bad header token {tok!r}: {exc}", offset=0)
    if width is None or height is None or rate is None:
        raise StreamParseError("header missing W, H or F token", offset=0)
    if colorspace not in _Y4M_COLORSPACES:
        raise UnsupportedFormatError(
            f"unsupported Y4M colorspace C{colorspace.decode('ascii', 'replace')}"
        )
    fmt = _Y4M_COLORSPACES[colorspace]
    if fmt is PixelFormat.YUV420_8BIT and (width % 2 or height % 2):
        raise GeometryError(f"4:2:0 needs even dimensions, got {width}x{height}")

    payload_size = frame_byte_size(fmt, width, height)
    body_start = stream.tell()
    stream.seek(0, os.SEEK_END)
    end = stream.tell()
    stream.seek(body_start)
    offsets: list[int] = []
    while True:
        line_start = stream.tell()
        probe = stream.read(6)
        if probe == b"":
            break
        if not probe.startswith(b"FRAME"):
            raise StreamParseError(
                f"expected FRAME marker, found {probe!r}", offset=line_start
            )
        stream.seek(line_start)
        _read_line(stream, line_start, "frame header")
        data_start = stream.tell()
        if end - data_start < payload_size:
            raise TruncatedStreamError(
                f"frame payload truncated: need {payload_size} bytes, "
                f"have {end - data_start}",
                frame_index=len(offsets),
            )
        offsets.append(data_start)
        stream.seek(data_start + payload_size)
    if not offsets:
        raise TruncatedStreamError("stream contains no frames", frame_index=0)

    video = VideoSource(width, height, rate, len(offsets), fmt)

    def frames() -> Iterator[Frame]:
        for i, off in enumerate(offsets):
            stream.seek(off)
            payload = stream.read(payload_size)
            yield Frame(i, fmt, _decode_planes(payload, fmt, width, height, i))

    return video, frames()


def write_y4m(path: str | Path | BinaryIO, video: VideoSource, frames) -> None:
    """Encode frames back to YUV4MPEG2 (inverse of :func:`parse_y4m`)."""
    if video.pixel_format is PixelFormat.YUV420_8BIT:
        ctag = "C420"
    elif video.pixel_format is PixelFormat.YUV444_8BIT:
        ctag = "C444"
    else:
        raise UnsupportedFormatError("Y4M carries YUV only")
    own = isinstance(path, (str, Path))
    stream = open(path, "wb") if own else path
    try:
        rate = video.frame_rate
        stream.write(
            f"YUV4MPEG2 W{video.width} H{video.height} "
            f"F{rate.numerator}:{rate.denominator} {ctag}\n".encode("ascii")
        )
        for frame in frames:
            stream.write(b"FRAME\n")
            for plane in frame.planes:
                stream.write(np.rint(plane).astype(np.uint8).tobytes())
    finally:
        if own:
            stream.close()


# ---------------------------------------------------------------------------
# Raw planar YUV
# ---------------------------------------------------------------------------


def read_raw_yuv(
    path: str | Path,
    width: int,
    height: int,
    frame_rate: Fraction | float | int,
    pixel_format: PixelFormat,
) -> tuple[VideoSource, Iterator[Frame]]:
    """Read headerless planar YUV with caller-supplied geometry."""
    if pixel_format is PixelFormat.RGB24:
        raise UnsupportedFormatError("raw reader handles planar YUV only")
    if pixel_format is PixelFormat.YUV420_8BIT and (width % 2 or height % 2):
        raise GeometryError(f"4:2:0 needs even dimensions, got {width}x{height}")
    per_frame = frame_byte_size(pixel_format, width, height)
    size = os.path.getsize(path)
    if size == 0:
        raise GeometryError(f"{path}: file is empty")
    if size % per_frame != 0:
        raise GeometryError(
            f"{path}: size {size} is not a multiple of the "
            f"{per_frame}-byte frame for {width}x{height} {pixel_format.value}"
        )
    count = size // per_frame
    rate = frame_rate if isinstance(frame_rate, Fraction) else Fraction(frame_rate).limit_denominator(1001 * 120)
    video = VideoSource(width, height, rate, count, pixel_format)

    def frames() -> Iterator[Frame]:
        with open(path, "rb") as fh:
            for i in range(count):
                payload = fh.read(per_frame)
                if len(payload) < per_frame:
                    raise TruncatedStreamError("raw frame payload short", frame_index=i)
                yield Frame(i, pixel_format, _decode_planes(payload, pixel_format, width, height, i))

    return video, frames()


# ---------------------------------------------------------------------------
# Color conversion
# ---------------------------------------------------------------------------


def yuv_to_rgb(frame: Frame) -> Frame:
    """Convert a YUV frame to planar RGB using BT.601 full-range weights.

    4:2:0 chroma is upsampled by nearest-neighbor duplication first; output
    planes are clamped to [0, 255].
    """
    if frame.pixel_format is PixelFormat.RGB24:
        return frame
    y, u, v = frame.planes
    if frame.pixel_format is PixelFormat.YUV420_8BIT:
        u = np.repeat(np.repeat(u, 2, axis=0), 2, axis=1)
        v = np.repeat(np.repeat(v, 2, axis=0), 2, axis=1)
    y = y.astype(np.float64)
    cb = u.astype(np.float64) - 128.0
    cr = v.astype(np.float64) - 128.0
    r = y + 2.0 * (1.0 - _KR) * cr
    b = y + 2.0 * (1.0 - _KB) * cb
    g = y - (2.0 * _KR * (1.0 - _KR) / _KG) * cr - (2.0 * _KB * (1.0 - _KB) / _KG) * cb
    planes = tuple(
        _freeze(np.clip(p, 0.0, 255.0).astype(np.float32)) for p in (r, g, b)
    )
    return Frame(frame.index, PixelFormat.RGB24, planes)


def frame_to_rgb_array(frame: Frame) -> np.ndarray:
    """Decode a frame straight to an (H, W, 3) float64 RGB array.

    Same conversion as :func:`yuv_to_rgb` without the intermediate float32
    Frame; this is the pipeline's hot ingest path.
    """
    if frame.pixel_format is PixelFormat.RGB24:
        return np.stack([p.astype(np.float64) for p in frame.planes], axis=-1)
    y, u, v = frame.planes
    if frame.pixel_format is PixelFormat.YUV420_8BIT:
        u = np.repeat(np.repeat(u, 2, axis=0), 2, axis=1)
        v = np.repeat(np.repeat(v, 2, axis=0), 2, axis=1)
    out = np.empty(y.shape + (3,), dtype=np.float64)
    y = y.astype(np.float64)
    cb = u.astype(np.float64)
    cb -= 128.0
    cr = v.astype(np.float64)
    cr -= 128.0
    out[..., 0] = y + (2.0 * (1.0 - _KR)) * cr
    out[..., 2] = y + (2.0 * (1.0 - _KB)) * cb
    out[..., 1] = y - (2.0 * _KR * (1.0 - _KR) / _KG) * cr \
        - (2.0 * _KB * (1.0 - _KB) / _KG) * cb
    np.clip(out, 0.0, 255.0, out=out)
    return out


# ---------------------------------------------------------------------------
# Chunk schedule
# ---------------------------------------------------------------------------

TEMPORAL_GROUP_SIZE = 8
SPATIAL_FRAMES_PER_CHUNK = 2


def build_schedule(source: VideoSource) -> ChunkSchedule:
    """Plan the per-second sampling for the three feature streams.

    Each whole second of video becomes one chunk of ``n = round(frame_rate)``
    frames starting at index ``s``: the spatial stream samples frames
    ``{s, s + n//2}``, the temporal stream the 8 consecutive frames
    ``{s, ..., s+7}``, and the deep-feature stream frame ``s``. Trailing
    partial seconds are dropped; chunks whose 8-frame group would run past
    the end of the stream are dropped too (possible only when n < 8).
    """
    if source.frame_count < TEMPORAL_GROUP_SIZE:
        raise TooShortError(
            f"need at least {TEMPORAL_GROUP_SIZE} frames, have {source.frame_count}"
        )
    if source.duration_seconds < 1:
        raise TooShortError(
            f"need at least one second of video, have "
            f"{float(source.duration_seconds):.3f}s"
        )
    n = max(1, round(float(source.frame_rate)))
    chunks = []
    for c in range(source.frame_count // n):
        s = c * n
        if s + TEMPORAL_GROUP_SIZE > source.frame_count:
            break
        chunks.append(
            ChunkPlan(
                start=s,
                length=n,
                spatial_frame_indices=(s, s + n // 2),
                temporal_frame_indices=tuple(range(s, s + TEMPORAL_GROUP_SIZE)),
                cnn_frame_index=s,
            )
        )
    if not chunks:
        raise TooShortError("no complete one-second chunk with an 8-frame group fits")
    return ChunkSchedule(tuple(chunks))
