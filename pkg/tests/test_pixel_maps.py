from __future__ import annotations

import numpy as np
import pytest

from vqkit.pixel_maps import (
    CHROMA_MAP_LABELS,
    LUMA_MAP_LABELS,
    MAP_LABELS,
    build_all_maps,
    cielab_chroma,
    difference_of_gaussians,
    dog_kernel,
    gradient_magnitude,
    log_kernel,
    log_of_gaussian,
    log_opponent,
    luma,
    opponent_color,
    resize_keep_aspect,
)


def _rgb(r, g, b, shape=(16, 16)):
    out = np.empty(shape + (3,))
    out[..., 0], out[..., 1], out[..., 2] = r, g, b
    return out


class TestResize:
    def test_1080p_to_512p(self):
        frame = np.zeros((1080, 1920, 3))
        out = resize_keep_aspect(frame, 512)
        assert out.shape == (512, 910, 3)

    def test_no_upscale(self):
        frame = np.random.default_rng(0).random((480, 640, 3))
        out = resize_keep_aspect(frame, 512)
        assert out is frame

    def test_exact_target_untouched(self):
        frame = np.zeros((512, 512, 3))
        assert resize_keep_aspect(frame, 512) is frame

    def test_idempotent(self):
        frame = np.random.default_rng(1).random((720, 1280, 3)) * 255
        once = resize_keep_aspect(frame, 512)
        twice = resize_keep_aspect(once, 512)
        assert np.array_equal(once, twice)

    def test_portrait(self):
        out = resize_keep_aspect(np.zeros((1920, 1080, 3)), 512)
        assert out.shape == (910, 512, 3)

    def test_constant_preserved(self):
        frame = np.full((1080, 1920, 3), 77.0)
        out = resize_keep_aspect(frame, 512)
        assert np.allclose(out, 77.0, atol=1e-9)


class TestLuma:
    def test_white(self):
        assert luma(_rgb(255, 255, 255))[0, 0] == pytest.approx(255.0)

    def test_pure_red(self):
        assert luma(_rgb(255, 0, 0))[0, 0] == pytest.approx(76.245)

    def test_black(self):
        assert luma(_rgb(0, 0, 0))[0, 0] == 0.0


class TestGradientMagnitude:
    def test_constant_is_zero(self):
        assert np.all(gradient_magnitude(np.full((16, 16), 93.0)) == 0.0)

    def test_horizontal_ramp_interior(self):
        img = np.tile(np.arange(32, dtype=np.float64), (32, 1))
        gm = gradient_magnitude(img)
        assert np.allclose(gm[1:-1, 1:-1], 8.0, rtol=1e-12)

    def test_transpose_symmetry(self):
        img = np.random.default_rng(2).random((20, 31)) * 255
        assert np.allclose(gradient_magnitude(img.T), gradient_magnitude(img).T,
                           rtol=1e-12, atol=1e-12)

    def test_non_negative(self):
        img = np.random.default_rng(3).random((24, 24)) * 255 - 128
        assert (gradient_magnitude(img) >= 0).all()


def _freq_response(kernel: np.ndarray, fy: float, fx: float) -> float:
    # Direct DTFT of an even-symmetric kernel at one frequency.
    half_h, half_w = kernel.shape[0] // 2, kernel.shape[1] // 2
    acc = 0.0
    for k in range(-half_h, half_h + 1):
        for l in range(-half_w, half_w + 1):
            acc += kernel[k + half_h, l + half_w] * np.cos(2 * np.pi * (fy * k + fx * l))
    return acc


class TestLogOfGaussian:
    def test_constant_near_zero(self):
        out = log_of_gaussian(np.full((32, 32), 200.0))
        assert np.abs(out).max() < 1e-6

    def test_impulse_gives_kernel(self):
        img = np.zeros((21, 21))
        img[10, 10] = 1.0
        out = log_of_gaussian(img)
        assert np.allclose(out[6:15, 6:15], log_kernel(), atol=1e-12)

    def test_sinusoid_frequency_response(self):
        fy, fx = 0.11, 0.06
        i, j = np.mgrid[0:64, 0:64].astype(np.float64)
        s = np.sin(2 * np.pi * (fy * i + fx * j) + 0.4)
        out = log_of_gaussian(s)
        gain = _freq_response(log_kernel(), fy, fx)
        assert np.allclose(out[8:-8, 8:-8], gain * s[8:-8, 8:-8], atol=1e-9)

    def test_kernel_zero_sum(self):
        assert abs(log_kernel().sum()) < 1e-15


class TestDifferenceOfGaussians:
    def test_constant_near_zero(self):
        out = difference_of_gaussians(np.full((32, 32), 150.0))
        assert np.abs(out).max() < 1e-9 * 150.0

    def test_impulse_gives_kernel(self):
        img = np.zeros((25, 25))
        img[12, 12] = 1.0
        out = difference_of_gaussians(img)
        assert np.allclose(out[7:18, 7:18], dog_kernel(), atol=1e-12)

    def test_ramp_interior_near_zero(self):
        img = np.tile(np.arange(48, dtype=np.float64), (48, 1))
        out = difference_of_gaussians(img)
        assert np.abs(out[6:-6, 6:-6]).max() < 1e-9


class TestOpponentColor:
    def test_unit_white(self):
        o2, o3 = opponent_color(_rgb(1, 1, 1))
        assert o2[0, 0] == pytest.approx(-0.01, abs=1e-12)
        assert o3[0, 0] == pytest.approx(-0.09, abs=1e-12)

    def test_black(self):
        o2, o3 = opponent_color(_rgb(0, 0, 0))
        assert o2[0, 0] == 0.0 and o3[0, 0] == 0.0

    def test_unit_red_matches_matrix_column(self):
        o2, o3 = opponent_color(_rgb(1, 0, 0))
        assert o2[0, 0] == pytest.approx(0.30)
        assert o3[0, 0] == pytest.approx(0.34)


class TestLogOpponent:
    def test_equal_red_green_kills_rg(self):
        rng = np.random.default_rng(4)
        plane = rng.random((12, 12)) * 255
        rgb = np.stack([plane, plane, rng.random((12, 12)) * 255], axis=-1)
        _, rg = log_opponent(rgb)
        assert np.allclose(rg, 0.0, atol=1e-12)

    def test_constant_frame_is_zero(self):
        by, rg = log_opponent(_rgb(40, 90, 200))
        assert np.allclose(by, 0.0, atol=1e-12)
        assert np.allclose(rg, 0.0, atol=1e-12)

    def test_scalar_oracle_red_only(self):
        rng = np.random.default_rng(5)
        r = np.where(rng.random((10, 10)) < 0.5, 0.9, rng.random((10, 10)))
        rgb = np.stack([r, np.zeros_like(r), np.zeros_like(r)], axis=-1)
        _, rg = log_opponent(rgb)
        # Scalar re-implementation: with G = B = 0 their centered logs vanish,
        # so RG is the centered log red channel over sqrt(2).
        logr = np.log(r + 0.1)
        expect = (logr - logr.mean()) / np.sqrt(2.0)
        assert np.allclose(rg, expect, atol=1e-12)


def _srgb_to_lab_scalar(r8, g8, b8):
    def lin(c):
        c = c / 255.0
        return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4

    rl, gl, bl = lin(r8), lin(g8), lin(b8)
    m = [
        (0.4124564, 0.3575761, 0.1804375),
        (0.2126729, 0.7151522, 0.0721750),
        (0.0193339, 0.1191920, 0.9503041),
    ]
    white = [sum(row) for row in m]
    xyz = [sum(c * v for c, v in zip(row, (rl, gl, bl))) / w for row, w in zip(m, white)]

    def f(t):
        return t ** (1 / 3) if t > (6 / 29) ** 3 else t / (3 * (6 / 29) ** 2) + 4 / 29

    fx, fy, fz = (f(t) for t in xyz)
    return 500 * (fx - fy), 200 * (fy - fz)


class TestCielab:
    def test_neutral_gray(self):
        a, b = cielab_chroma(_rgb(128, 128, 128))
        assert abs(a[0, 0]) < 0.5 and abs(b[0, 0]) < 0.5

    def test_white(self):
        a, b = cielab_chroma(_rgb(255, 255, 255))
        assert abs(a[0, 0]) < 0.5 and abs(b[0, 0]) < 0.5

    def test_red_against_scalar_oracle(self):
        a, b = cielab_chroma(_rgb(255, 0, 0))
        ae, be = _srgb_to_lab_scalar(255, 0, 0)
        assert a[0, 0] == pytest.approx(ae, abs=1e-9)
        assert b[0, 0] == pytest.approx(be, abs=1e-9)
        assert (ae, be) == pytest.approx((80.1, 67.2), abs=0.15)


class TestBuildAllMaps:
    def test_exact_label_set(self):
        rng = np.random.default_rng(6)
        maps = build_all_maps(rng.random((24, 24, 3)) * 255)
        assert tuple(m.label for m in maps) == MAP_LABELS
        assert len(maps) == 16
        assert set(MAP_LABELS) == set(LUMA_MAP_LABELS) | set(CHROMA_MAP_LABELS)

    def test_constant_gray_bandpass_maps_vanish(self):
        maps = {m.label: m.data for m in build_all_maps(_rgb(128, 128, 128, (24, 24)))}
        for label in ("GM", "LoG", "DoG", "GMO2", "GMO3", "GMBY", "GMRG", "GMA", "GMB"):
            assert np.abs(maps[label]).max() < 1e-6, label

    def test_dimensions_match_input(self):
        rng = np.random.default_rng(7)
        frame = rng.random((20, 30, 3)) * 255
        for m in build_all_maps(frame):
            assert m.data.shape == (20, 30)

    def test_all_finite_for_8bit_input(self):
        rng = np.random.default_rng(8)
        frame = rng.integers(0, 256, (32, 32, 3)).astype(np.float64)
        for m in build_all_maps(frame):
            assert np.isfinite(m.data).all(), m.label
