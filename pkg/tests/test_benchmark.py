from __future__ import annotations

import json

from conftest import y4m_bytes
from vqkit.benchmark import benchmark, write_benchmark_report
from vqkit.pipeline import STAGE_NAMES


def _clip(tmp_path, name, width, height, count=16, fps=8):
    from fractions import Fraction

    path = tmp_path / name
    path.write_bytes(y4m_bytes(width, height, count, Fraction(fps), seed=42))
    return path


def test_report_structure_and_medians(tmp_path):
    clip = _clip(tmp_path, "a.y4m", 64, 64)
    report = benchmark([clip], repetitions=3)
    video = report["videos"][0]
    assert video["repetitions"] == 3
    assert set(video["stages"]) == set(STAGE_NAMES)
    for stage in video["stages"].values():
        assert stage["min"] <= stage["median"] <= stage["max"]
    assert video["total"]["median"] > 0
    assert video["resolution_class"] == "64p"


def test_stage_sum_tracks_total(tmp_path):
    clip = _clip(tmp_path, "a.y4m", 128, 128, count=24)
    report = benchmark([clip], repetitions=2)
    video = report["videos"][0]
    stage_sum = sum(s["median"] for s in video["stages"].values())
    assert stage_sum <= video["total"]["median"]
    assert stage_sum >= 0.5 * video["total"]["median"]


def test_larger_frames_cost_more_spatial_time(tmp_path):
    small = _clip(tmp_path, "small.y4m", 64, 64)
    big = _clip(tmp_path, "big.y4m", 192, 192)
    report = benchmark([small, big], repetitions=2)
    t_small = report["videos"][0]["stages"]["spatial_nss"]["median"]
    t_big = report["videos"][1]["stages"]["spatial_nss"]["median"]
    assert t_big > t_small


def test_report_is_json_serializable(tmp_path):
    clip = _clip(tmp_path, "a.y4m", 64, 64)
    report = benchmark([clip], repetitions=1)
    out = tmp_path / "report.json"
    write_benchmark_report(report, out)
    assert json.loads(out.read_text())["videos"]
