"""Wall-clock benchmark: repeated single-threaded extraction per input with
per-stage timings (frame preparation is charged to the stage that consumes
the frames, so stage sums account for nearly all of the total).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import Config
from .pipeline import STAGE_NAMES, extract_video
from .video_io import build_schedule, parse_y4m


def _summary(samples: list[float]) -> dict:
    return {
        "median": float(np.median(samples)),
        "min": float(min(samples)),
        "max": float(max(samples)),
    }


def benchmark(video_paths, repetitions: int = 3, config: Config = Config()) -> dict:
    """Time extraction (no deep sidecar) over each input.

    Runs single-threaded so the per-stage accounting identity holds:
    stage sums track the measured total up to orchestration overhead.
    Returns a machine-readable table; medians are the headline numbers,
    min/max ride along.
    """
    config = config.replace(threads=1)
    videos = []
    for path in video_paths:
        stage_samples: dict[str, list[float]] = {name: [] for name in STAGE_NAMES}
        totals: list[float] = []
        geometry = None
        for _ in range(max(1, repetitions)):
            video, frames = parse_y4m(path)
            geometry = video
            schedule = build_schedule(video)
            _, meta = extract_video(video, frames, schedule,
                                    config=config, no_deep=True)
            for name in STAGE_NAMES:
                stage_samples[name].append(meta["timings_seconds"][name])
            totals.append(meta["total_seconds"])
        short_side = min(geometry.width, geometry.height)
        videos.append({
            "path": str(path),
            "width": geometry.width,
            "height": geometry.height,
            "resolution_class": f"{short_side}p",
            "frame_count": geometry.frame_count,
            "repetitions": max(1, repetitions),
            "stages": {name: _summary(stage_samples[name]) for name in STAGE_NAMES},
            "total": _summary(totals),
        })
    return {"config": config.as_dict(), "videos": videos}


def write_benchmark_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
