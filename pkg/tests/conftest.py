from __future__ import annotations

import io
from fractions import Fraction

import numpy as np
import pytest

from vqkit.video_io import Frame, PixelFormat, VideoSource, write_y4m


def make_yuv420_frames(rng: np.ndarray, width: int, height: int, count: int,
                       static: bool = False) -> list[Frame]:
    """Random 4:2:0 frames with enough texture that no fit degenerates."""
    frames = []
    base = (
        rng.integers(0, 256, size=(height, width)),
        rng.integers(0, 256, size=(height // 2, width // 2)),
        rng.integers(0, 256, size=(height // 2, width // 2)),
    )
    for i in range(count):
        if static:
            y, u, v = base
        else:
            y = rng.integers(0, 256, size=(height, width))
            u = rng.integers(0, 256, size=(height // 2, width // 2))
            v = rng.integers(0, 256, size=(height // 2, width // 2))
        planes = tuple(p.astype(np.float32) for p in (y, u, v))
        for p in planes:
            p.flags.writeable = False
        frames.append(Frame(i, PixelFormat.YUV420_8BIT, planes))
    return frames


def y4m_bytes(width: int = 64, height: int = 64, count: int = 25,
              rate: Fraction = Fraction(25), seed: int = 0,
              static: bool = False) -> bytes:
    rng = np.random.default_rng(seed)
    video = VideoSource(width, height, rate, count, PixelFormat.YUV420_8BIT)
    frames = make_yuv420_frames(rng, width, height, count, static=static)
    buf = io.BytesIO()
    write_y4m(buf, video, frames)
    return buf.getvalue()


@pytest.fixture(scope="session")
def fixture_y4m(tmp_path_factory) -> str:
    """A small 2-second noise video shared across tests."""
    path = tmp_path_factory.mktemp("fixtures") / "noise_64x64_25fps.y4m"
    path.write_bytes(y4m_bytes(64, 64, 50, Fraction(25), seed=11))
    return str(path)
