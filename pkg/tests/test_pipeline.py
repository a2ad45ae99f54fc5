from __future__ import annotations

import json

import numpy as np
import pytest

from conftest import y4m_bytes
from vqkit.config import Config
from vqkit.deep_features import write_deep_features
from vqkit.errors import AlignmentError, PreconditionError, SidecarFormatError
from vqkit.pipeline import (
    SPATIAL_DIM,
    SPATIAL_LUMA_DIM,
    TEMPORAL_DIM,
    VIDEO_DIM,
    ChunkFeatures,
    assemble_video,
    describe_feature,
    describe_spatial_feature,
    extract_video,
    pool_chunk_spatial,
    read_features,
    spatial_feature_index,
    spatial_features,
    write_features,
)
from vqkit.video_io import build_schedule, parse_y4m


class TestDimensionIdentities:
    def test_arithmetic(self):
        assert SPATIAL_DIM == 34 * 2 * 4 + 34 * 1 * 12 == 680
        assert SPATIAL_LUMA_DIM == 34 * 2 * 4 == 272
        assert SPATIAL_LUMA_DIM + 34 * 12 == SPATIAL_DIM
        assert TEMPORAL_DIM == 34 * 7 * 2 == 476
        assert VIDEO_DIM == 680 + 680 + 476 + 2048 == 3884


class TestSpatialLayout:
    def test_luma_block_is_first_272(self):
        for idx in range(SPATIAL_DIM):
            scale, label, slot = describe_spatial_feature(idx)
            if idx < SPATIAL_LUMA_DIM:
                assert label in ("Y", "GM", "LoG", "DoG")
            else:
                assert label not in ("Y", "GM", "LoG", "DoG")
                assert scale == "half"
            assert spatial_feature_index(scale, label, slot) == idx

    def test_full_vector_names(self):
        names = [describe_feature(i) for i in range(VIDEO_DIM)]
        assert names[0].startswith("spatial_avg/full/Y/")
        assert names[SPATIAL_DIM].startswith("spatial_absdiff/")
        assert names[2 * SPATIAL_DIM].startswith("temporal/full/band1/")
        assert names[2 * SPATIAL_DIM + TEMPORAL_DIM] == "deep/0"
        assert names[-1] == f"deep/{2048 - 1}"
        assert len(set(names)) == VIDEO_DIM


class TestSpatialFeatures:
    def test_length_and_finite(self):
        rng = np.random.default_rng(0)
        frame = rng.integers(0, 256, (64, 64, 3)).astype(np.float64)
        values, flags = spatial_features(frame)
        assert values.shape == (SPATIAL_DIM,)
        assert np.isfinite(values).all()
        assert not flags

    def test_constant_gray_flags_degenerate(self):
        frame = np.full((64, 64, 3), 128.0)
        values, flags = spatial_features(frame)
        assert flags
        # the GM map of a flat frame is flat: its GGD fit falls back to neutral
        gm_alpha = values[spatial_feature_index("full", "GM", 0)]
        gm_sigma = values[spatial_feature_index("full", "GM", 1)]
        assert (gm_alpha, gm_sigma) == (2.0, 0.0)
        assert np.isfinite(values).all()


class TestPooling:
    def test_identical_vectors(self):
        v = np.random.default_rng(1).normal(size=SPATIAL_DIM)
        avg, diff = pool_chunk_spatial([v, v])
        assert np.array_equal(avg, v)
        assert np.all(diff == 0.0)

    def test_opposite_vectors(self):
        v = np.random.default_rng(2).normal(size=SPATIAL_DIM)
        avg, diff = pool_chunk_spatial([v, -v])
        assert np.all(avg == 0.0)
        assert np.allclose(diff, 2.0 * np.abs(v), rtol=1e-15)

    def test_arithmetic(self):
        a = np.full(SPATIAL_DIM, 1.0)
        b = np.full(SPATIAL_DIM, 3.0)
        avg, diff = pool_chunk_spatial([a, b])
        assert np.all(avg == 2.0) and np.all(diff == 2.0)

    def test_wrong_count(self):
        with pytest.raises(PreconditionError):
            pool_chunk_spatial([np.zeros(SPATIAL_DIM)])


def _chunk(rng, deep_dim=2048):
    return ChunkFeatures(
        spatial=(rng.normal(size=SPATIAL_DIM), rng.normal(size=SPATIAL_DIM)),
        temporal=rng.normal(size=TEMPORAL_DIM),
        deep=rng.normal(size=deep_dim),
    )


class TestAssemble:
    def test_single_chunk_identity(self):
        rng = np.random.default_rng(3)
        c = _chunk(rng)
        vec = assemble_video([c])
        avg, diff = pool_chunk_spatial(c.spatial)
        assert np.array_equal(vec.spatial_avg, avg)
        assert np.array_equal(vec.spatial_absdiff, diff)
        assert np.array_equal(vec.temporal, c.temporal)
        assert len(vec) == VIDEO_DIM
        assert vec.concatenated.shape == (VIDEO_DIM,)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        chunks = [_chunk(rng) for _ in range(5)]
        a = assemble_video(chunks).concatenated
        b = assemble_video(chunks[::-1]).concatenated
        assert np.allclose(a, b, rtol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(PreconditionError):
            assemble_video([])


class TestExtractVideo:
    def test_fixture_with_sidecar(self, fixture_y4m, tmp_path):
        video, frames = parse_y4m(fixture_y4m)
        schedule = build_schedule(video)
        rng = np.random.default_rng(5)
        rows = rng.normal(size=(len(schedule), 2048)).astype(np.float32)
        sidecar = tmp_path / "deep.dfv"
        write_deep_features(sidecar, rows)
        vec, meta = extract_video(video, frames, schedule, deep=sidecar)
        flat = vec.concatenated
        assert flat.shape == (VIDEO_DIM,)
        assert np.isfinite(flat).all()
        assert np.allclose(vec.deep, rows.astype(np.float64).mean(axis=0), rtol=1e-7)
        assert meta["chunks"] == len(schedule)
        assert set(meta["timings_seconds"]) == {
            "spatial_nss", "spatial_nss_var", "temporal_nss", "deep_ingest"}

    def test_no_deep_zero_fills_and_warns(self, fixture_y4m):
        video, frames = parse_y4m(fixture_y4m)
        schedule = build_schedule(video)
        vec, meta = extract_video(video, frames, schedule, no_deep=True)
        assert np.all(vec.deep == 0.0)
        assert any("zero-filled" in w for w in meta["warnings"])

    def test_missing_sidecar_is_an_error(self, fixture_y4m):
        video, frames = parse_y4m(fixture_y4m)
        schedule = build_schedule(video)
        with pytest.raises(AlignmentError):
            extract_video(video, frames, schedule)

    def test_misaligned_rows_rejected(self, fixture_y4m):
        video, frames = parse_y4m(fixture_y4m)
        schedule = build_schedule(video)
        rows = np.zeros((len(schedule) + 1, 2048))
        with pytest.raises(AlignmentError):
            extract_video(video, frames, schedule, deep=rows)

    def test_determinism_across_thread_counts(self, fixture_y4m):
        outputs = []
        for threads in (1, 2, 1):
            video, frames = parse_y4m(fixture_y4m)
            schedule = build_schedule(video)
            vec, _ = extract_video(video, frames, schedule, no_deep=True,
                                   config=Config(threads=threads))
            outputs.append(vec.concatenated.astype("<f4").tobytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_zero_motion_video(self, tmp_path):
        path = tmp_path / "static.y4m"
        path.write_bytes(y4m_bytes(64, 64, 25, seed=9, static=True))
        video, frames = parse_y4m(path)
        schedule = build_schedule(video)
        vec, meta = extract_video(video, frames, schedule, no_deep=True)
        assert np.all(vec.spatial_absdiff == 0.0)
        assert any("temporal" in f for f in meta["degenerate_fits"])


class TestFeatureFile:
    def test_roundtrip(self, tmp_path):
        vec = np.random.default_rng(6).normal(size=100).astype(np.float32)
        path = tmp_path / "x.ftv"
        write_features(path, vec, metadata={"hello": 1})
        got = read_features(path)
        assert np.array_equal(got, vec)
        meta = json.loads((tmp_path / "x.ftv.meta.json").read_text())
        assert meta == {"hello": 1}

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.ftv"
        path.write_bytes(b"NOPE" + b"\x00" * 8)
        with pytest.raises(SidecarFormatError):
            read_features(path)


class TestAlternateDeepProviders:
    def test_non_default_dim_sidecar_flows_through(self, fixture_y4m, tmp_path):
        video, frames = parse_y4m(fixture_y4m)
        schedule = build_schedule(video)
        rows = np.arange(len(schedule) * 16, dtype=np.float32).reshape(len(schedule), 16)
        sidecar = tmp_path / "alt.dfv"
        write_deep_features(sidecar, rows)
        vec, meta = extract_video(video, frames, schedule, deep=sidecar)
        assert vec.deep.shape == (16,)
        assert len(vec) == 2 * SPATIAL_DIM + TEMPORAL_DIM + 16
        assert meta["blocks"]["deep"] == [2 * SPATIAL_DIM + TEMPORAL_DIM, len(vec)]
        assert np.allclose(vec.deep, rows.mean(axis=0), rtol=1e-7)
