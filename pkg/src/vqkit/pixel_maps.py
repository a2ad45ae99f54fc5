"""Per-frame feature maps: luma bandpass transforms and chromatic projections.

All operations take float arrays in display range ([0, 255] RGB); boundary
handling for every convolution is symmetric (mirrored) padding. The 16-map
set produced by :func:`build_all_maps` is the input alphabet for the
statistical feature extractor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import signal
from scipy.ndimage import convolve1d

from .resample import downscale_half, resize

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

# Laplacian-of-Gaussian: 9x9 window; sigma = 9/6 puts +-3 sigma at the rim.
LOG_WINDOW = 9
LOG_SIGMA = 1.5

# Difference-of-Gaussians: first level of a k = 1.6 pyramid, 11x11 window.
DOG_SIGMA1 = 1.0
DOG_SIGMA2 = 1.6
DOG_WINDOW = 11

OPPONENT_MATRIX = np.array(
    [
        [0.06, 0.63, 0.27],
        [0.30, 0.04, -0.35],
        [0.34, -0.60, 0.17],
    ]
)

# sRGB -> CIEXYZ (D65, 2 degree observer); rows sum to the white point.
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = _SRGB_TO_XYZ.sum(axis=1)

SOBEL_X = np.array([[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]])
SOBEL_Y = SOBEL_X.T.copy()

LUMA_MAP_LABELS = ("Y", "GM", "LoG", "DoG")
CHROMA_MAP_LABELS = (
    "O2", "O3", "GMO2", "GMO3",
    "BY", "RG", "GMBY", "GMRG",
    "A", "B", "GMA", "GMB",
)
MAP_LABELS = LUMA_MAP_LABELS + CHROMA_MAP_LABELS


@dataclass(frozen=True)
class FeatureMap:
    """A single-channel transform of one frame, tagged with its identity."""

    label: str
    data: np.ndarray
    scale: str = "full"


def convolve_symmetric(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """2D convolution with mirrored edges, output sized like the input."""
    ph, pw = kernel.shape[0] // 2, kernel.shape[1] // 2
    padded = np.pad(img, ((ph, ph), (pw, pw)), mode="symmetric")
    method = "direct" if kernel.size <= 9 else "auto"
    return signal.convolve(padded, kernel, mode="valid", method=method)


def resize_keep_aspect(rgb: np.ndarray, target_short_side: int = 512) -> np.ndarray:
    """Downscale so the short side equals the target; never upscale.

    The long side is rounded to the nearest even integer. Frames whose short
    side is already <= target pass through unchanged, which makes the
    operation idempotent. Output is clamped back to display range: bicubic
    overshoot would otherwise leak outside [0, 255] and break the chroma
    transforms' input contract.
    """
    if target_short_side < 64:
        raise ValueError("target_short_side must be at least 64")
    h, w = rgb.shape[:2]
    short = min(h, w)
    if short <= target_short_side:
        return rgb
    scale = target_short_side / short
    if h <= w:
        out = (target_short_side, 2 * round(w * scale / 2.0))
    else:
        out = (2 * round(h * scale / 2.0), target_short_side)
    return np.clip(resize(rgb, out), 0.0, 255.0)


def downscale_half_frame(rgb: np.ndarray) -> np.ndarray:
    """Half-scale pass for display-range frames (clamped, unlike raw maps)."""
    return np.clip(downscale_half(rgb), 0.0, 255.0)


def luma(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    wr, wg, wb = LUMA_WEIGHTS
    return wr * r + wg * g + wb * b


_SOBEL_SMOOTH = np.array([1.0, 2.0, 1.0])
_SOBEL_DIFF = np.array([1.0, 0.0, -1.0])


def gradient_magnitude(img: np.ndarray) -> np.ndarray:
    # Sobel responses via the separable factorization [1,2,1] (x) [1,0,-1].
    gx = convolve1d(convolve1d(img, _SOBEL_SMOOTH, axis=0, mode="reflect"),
                    _SOBEL_DIFF, axis=1, mode="reflect")
    gy = convolve1d(convolve1d(img, _SOBEL_SMOOTH, axis=1, mode="reflect"),
                    _SOBEL_DIFF, axis=0, mode="reflect")
    return np.sqrt(gx * gx + gy * gy)


@lru_cache(maxsize=None)
def log_kernel(window: int = LOG_WINDOW, sigma: float = LOG_SIGMA) -> np.ndarray:
    """Sampled Laplacian-of-Gaussian kernel with discrete zero-sum correction."""
    half = window // 2
    y, x = np.mgrid[-half: half + 1, -half: half + 1].astype(np.float64)
    r2 = x * x + y * y
    k = (r2 - 2.0 * sigma**2) / (2.0 * np.pi * sigma**6) * np.exp(-r2 / (2.0 * sigma**2))
    k -= k.mean()
    k.flags.writeable = False
    return k


@lru_cache(maxsize=None)
def _gaussian_kernel(window: int, sigma: float) -> np.ndarray:
    half = window // 2
    y, x = np.mgrid[-half: half + 1, -half: half + 1].astype(np.float64)
    k = np.exp(-(x * x + y * y) / (2.0 * sigma**2))
    k /= k.sum()
    k.flags.writeable = False
    return k


@lru_cache(maxsize=None)
def dog_kernel(window: int = DOG_WINDOW,
               sigma1: float = DOG_SIGMA1,
               sigma2: float = DOG_SIGMA2) -> np.ndarray:
    k = _gaussian_kernel(window, sigma1) - _gaussian_kernel(window, sigma2)
    k.flags.writeable = False
    return k


def log_of_gaussian(img: np.ndarray) -> np.ndarray:
    return convolve_symmetric(img, log_kernel())


def difference_of_gaussians(img: np.ndarray) -> np.ndarray:
    return convolve_symmetric(img, dog_kernel())


def opponent_color(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Second and third opponent-color projections (O1 stays internal)."""
    o = np.tensordot(rgb, OPPONENT_MATRIX.T, axes=1)
    return o[..., 1], o[..., 2]


def log_opponent(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Blue-yellow and red-green projections of mean-centered log channels."""
    logc = np.log(rgb + 0.1)
    logc = logc - logc.mean(axis=(0, 1), keepdims=True)
    lr, lg, lb = logc[..., 0], logc[..., 1], logc[..., 2]
    by = (lr + lg - 2.0 * lb) / np.sqrt(6.0)
    rg = (lr - lg) / np.sqrt(2.0)
    return by, rg


def cielab_chroma(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CIELAB a* and b* channels of an sRGB frame (D65 white)."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    linear = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = np.tensordot(linear, _SRGB_TO_XYZ.T, axes=1) / _D65_WHITE
    eps = (6.0 / 29.0) ** 3
    f = np.where(xyz > eps, np.cbrt(xyz), xyz / (3.0 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return a, b


def build_luma_maps(rgb: np.ndarray, scale: str = "full") -> list[FeatureMap]:
    y = luma(rgb)
    return [
        FeatureMap("Y", y, scale),
        FeatureMap("GM", gradient_magnitude(y), scale),
        FeatureMap("LoG", log_of_gaussian(y), scale),
        FeatureMap("DoG", difference_of_gaussians(y), scale),
    ]


def build_all_maps(rgb: np.ndarray, scale: str = "full") -> list[FeatureMap]:
    """All 16 feature maps of one frame, in the frozen label order."""
    maps = build_luma_maps(rgb, scale)
    o2, o3 = opponent_color(rgb)
    by, rg = log_opponent(rgb)
    a, b = cielab_chroma(rgb)
    for label, chroma in (("O2", o2), ("O3", o3), ("BY", by),
                          ("RG", rg), ("A", a), ("B", b)):
        maps.append(FeatureMap(label, chroma, scale))
        maps.append(FeatureMap("GM" + label, gradient_magnitude(chroma), scale))
    order = {label: i for i, label in enumerate(MAP_LABELS)}
    maps.sort(key=lambda m: order[m.label])
    return maps
