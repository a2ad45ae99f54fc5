from __future__ import annotations

import numpy as np
import pytest

from vqkit.errors import PreconditionError, ShapeError
from vqkit.nss import NSS34_DIM
from vqkit.temporal import (
    TEMPORAL_DIM,
    describe_temporal_feature,
    haar_bank,
    haar_basis,
    temporal_feature_index,
    temporal_nss,
    temporal_subbands,
)


class TestHaarBank:
    def test_dc_row(self):
        bank = haar_bank()
        assert np.allclose(bank.filters[0], 1.0 / np.sqrt(8.0), atol=0)
        assert bank.filters.shape == (8, 8)

    def test_orthonormal(self):
        f = haar_bank().filters
        assert np.abs(f @ f.T - np.eye(8)).max() < 1e-12

    def test_finest_level_adjacent_pairs(self):
        f = haar_bank().filters
        for k, start in zip(range(4, 8), range(0, 8, 2)):
            row = np.zeros(8)
            row[start] = 1.0 / np.sqrt(2.0)
            row[start + 1] = -1.0 / np.sqrt(2.0)
            assert np.array_equal(f[k], row)

    def test_frequency_ordering_by_sign_changes(self):
        f = haar_bank().filters
        changes = [int(np.sum(np.diff(np.sign(row)[np.sign(row) != 0]) != 0))
                   for row in f]
        assert changes[0] == 0
        assert all(c >= 1 for c in changes[1:])

    def test_non_power_of_two(self):
        with pytest.raises(PreconditionError):
            haar_basis(6)


class TestTemporalSubbands:
    def test_static_frames_dc_only(self):
        frame = np.random.default_rng(0).random((16, 16)) * 255
        bands = temporal_subbands([frame] * 8)
        assert np.allclose(bands[0], np.sqrt(8.0) * frame, rtol=1e-12)
        for band in bands[1:]:
            assert np.abs(band).max() < 1e-9

    def test_alternating_frames_finest_level_only(self):
        frame = np.ones((8, 8))
        frames = [frame * (-1.0) ** t for t in range(8)]
        bands = temporal_subbands(frames)
        expected = haar_bank().filters @ np.array([(-1.0) ** t for t in range(8)])
        for k in range(8):
            assert np.allclose(bands[k], expected[k], atol=1e-12)
        for k in range(4):
            assert np.abs(bands[k]).max() < 1e-12
        for k in range(4, 8):
            assert np.abs(bands[k]).max() > 1.0

    def test_energy_conservation(self):
        rng = np.random.default_rng(1)
        frames = [rng.random((12, 20)) * 255 for _ in range(8)]
        bands = temporal_subbands(frames)
        lhs = sum(b * b for b in bands)
        rhs = sum(np.asarray(f, dtype=np.float64) ** 2 for f in frames)
        assert np.allclose(lhs, rhs, rtol=1e-9)

    def test_linearity(self):
        rng = np.random.default_rng(2)
        fa = [rng.random((8, 8)) for _ in range(8)]
        fb = [rng.random((8, 8)) for _ in range(8)]
        mixed = temporal_subbands([2.0 * a + 3.0 * b for a, b in zip(fa, fb)])
        separate = [2.0 * a + 3.0 * b
                    for a, b in zip(temporal_subbands(fa), temporal_subbands(fb))]
        for m, s in zip(mixed, separate):
            assert np.allclose(m, s, rtol=1e-9, atol=1e-12)

    def test_two_tap_special_case_exact_on_binary_frames(self):
        rng = np.random.default_rng(3)
        f0 = rng.integers(0, 2, (16, 16)).astype(np.float64)
        f1 = rng.integers(0, 2, (16, 16)).astype(np.float64)
        bank2 = haar_bank(2)
        bands = temporal_subbands([f0, f1], bank=bank2)
        direct = (f0 - f1) / np.sqrt(2.0)
        assert np.array_equal(bands[1], direct)

    def test_two_tap_special_case_float_frames(self):
        rng = np.random.default_rng(4)
        f0 = rng.random((16, 16)) * 255
        f1 = rng.random((16, 16)) * 255
        bands = temporal_subbands([f0, f1], bank=haar_bank(2))
        assert np.allclose(bands[1], (f0 - f1) / np.sqrt(2.0), rtol=1e-14)

    def test_geometry_mismatch(self):
        frames = [np.zeros((8, 8))] * 7 + [np.zeros((8, 9))]
        with pytest.raises(ShapeError):
            temporal_subbands(frames)

    def test_wrong_count(self):
        with pytest.raises(ShapeError):
            temporal_subbands([np.zeros((8, 8))] * 7)


class TestTemporalNss:
    def test_output_length(self):
        rng = np.random.default_rng(5)
        frames = [rng.normal(0, 0.25, (32, 32)) for _ in range(8)]
        bands = temporal_subbands(frames)
        values, flags = temporal_nss(bands[1:])
        assert values.shape == (TEMPORAL_DIM,)
        assert TEMPORAL_DIM == 476 == NSS34_DIM * 7 * 2
        assert not flags

    def test_static_scene_neutral_defaults(self):
        bands = [np.zeros((32, 32))] * 7
        values, flags = temporal_nss(bands)
        assert flags
        assert np.isfinite(values).all()

    def test_noise_subbands_alpha_near_two(self):
        rng = np.random.default_rng(6)
        frames = [rng.normal(0, 0.25, (256, 256)) for _ in range(8)]
        bands = temporal_subbands(frames)
        values, _ = temporal_nss(bands[1:])
        for k in range(1, 8):
            f1 = values[temporal_feature_index("full", k, 0)]
            assert 1.7 <= f1 <= 2.3, (k, f1)

    def test_wrong_band_count(self):
        with pytest.raises(ShapeError):
            temporal_nss([np.zeros((32, 32))] * 8)

    def test_layout_round_trip_all_indices(self):
        seen = set()
        for idx in range(TEMPORAL_DIM):
            scale, band, slot = describe_temporal_feature(idx)
            assert temporal_feature_index(scale, band, slot) == idx
            seen.add((scale, band, slot))
        assert len(seen) == TEMPORAL_DIM
