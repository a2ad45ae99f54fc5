"""Bandpass scene-statistics features: divisive normalization, generalized
Gaussian fits, and the 34-feature summary computed per feature map.

The 34-slot layout is frozen:

====  =======================================================
slot  contents
====  =======================================================
0-1   (alpha, sigma) of a GGD fit to the normalized coefficients
2-3   (mean, squared reciprocal CoV) of the local-deviation field
4-19  (nu, eta, sigma_l, sigma_r) of AGGD fits to the four
      neighboring-pixel product maps (H, V, D1, D2)
20-33 (alpha, sigma) of GGD fits to the seven paired
      log-derivative maps
====  =======================================================
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.ndimage import correlate1d
from scipy.special import gammaln

from .errors import DegenerateInputError, PreconditionError

MSCN_C = 1.0
MSCN_HALF_WINDOW = 3          # 7x7 window
MSCN_SIGMA = 7.0 / 6.0        # window std: one sixth of the window size

SHAPE_GRID_MIN = 0.05
SHAPE_GRID_MAX = 20.0
SHAPE_GRID_POINTS = 8192      # geometric spacing, step ~7.3e-4

SIGMA_FIELD_COV_CAP = 1e6     # sentinel for constant deviation fields

PRODUCT_LABELS = ("H", "V", "D1", "D2")
LOG_DERIVATIVE_LABELS = ("D1", "D2", "D3", "D4", "D5", "D6", "D7")

GGD_NEUTRAL = (2.0, 0.0)
AGGD_NEUTRAL = (2.0, 0.0, 0.0, 0.0)

NSS34_SLOTS: tuple[str, ...] = (
    ("mscn_ggd_alpha", "mscn_ggd_sigma", "sigma_field_mean", "sigma_field_rcov2")
    + tuple(
        f"product_{d.lower()}_aggd_{p}"
        for d in PRODUCT_LABELS
        for p in ("nu", "eta", "sigma_l", "sigma_r")
    )
    + tuple(
        f"logderiv_{d.lower()}_ggd_{p}"
        for d in LOG_DERIVATIVE_LABELS
        for p in ("alpha", "sigma")
    )
)
NSS34_DIM = len(NSS34_SLOTS)
assert NSS34_DIM == 34


@dataclass(frozen=True)
class MscnResult:
    """Normalized coefficients plus the local mean and deviation fields."""

    mscn: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True)
class GgdParams:
    alpha: float
    sigma: float


@dataclass(frozen=True)
class AggdParams:
    nu: float
    eta: float
    sigma_l: float
    sigma_r: float


@dataclass(frozen=True)
class Nss34Result:
    values: np.ndarray
    degenerate: tuple[str, ...]

    @property
    def is_degenerate(self) -> bool:
        return bool(self.degenerate)


@lru_cache(maxsize=None)
def _window_1d(half: int, sigma: float) -> np.ndarray:
    k = np.arange(-half, half + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    w /= w.sum()
    w.flags.writeable = False
    return w


def mscn(img: np.ndarray,
         c: float = MSCN_C,
         half_window: int = MSCN_HALF_WINDOW,
         window_sigma: float = MSCN_SIGMA) -> MscnResult:
    """Divisively normalize an image against its local mean and deviation.

    The weighting window is a truncated isotropic Gaussian renormalized to
    unit volume; edges are mirrored.
    """
    img = np.asarray(img, dtype=np.float64)
    size = 2 * half_window + 1
    if img.shape[0] < size or img.shape[1] < size:
        raise PreconditionError(
            f"map {img.shape} smaller than the {size}x{size} window"
        )
    w = _window_1d(half_window, window_sigma)

    def smooth(a: np.ndarray) -> np.ndarray:
        return correlate1d(correlate1d(a, w, axis=0, mode="reflect"),
                           w, axis=1, mode="reflect")

    mu = smooth(img)
    ex2 = smooth(img * img)
    sigma = np.sqrt(np.clip(ex2 - mu * mu, 0.0, None))
    return MscnResult((img - mu) / (sigma + c), mu, sigma)


# ---------------------------------------------------------------------------
# Moment-matching fits
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _shape_table() -> tuple[np.ndarray, np.ndarray]:
    """(alpha, rho) grid where rho(a) = G(1/a)G(3/a)/G(2/a)^2, rho ascending."""
    alphas = np.geomspace(SHAPE_GRID_MIN, SHAPE_GRID_MAX, SHAPE_GRID_POINTS)
    rho = np.exp(gammaln(1.0 / alphas) + gammaln(3.0 / alphas)
                 - 2.0 * gammaln(2.0 / alphas))
    # rho decreases with alpha; store both reversed so searchsorted applies.
    alphas, rho = alphas[::-1].copy(), rho[::-1].copy()
    alphas.flags.writeable = False
    rho.flags.writeable = False
    return alphas, rho


def _invert_shape_ratio(ratio: float) -> float:
    """Shape whose moment ratio is nearest to ``ratio`` (binary search)."""
    alphas, rho = _shape_table()
    i = int(np.searchsorted(rho, ratio))
    if i <= 0:
        return float(alphas[0])
    if i >= rho.size:
        return float(alphas[-1])
    return float(alphas[i] if rho[i] - ratio < ratio - rho[i - 1] else alphas[i - 1])


def _gamma_ratio(a: float, b: float) -> float:
    return float(np.exp(gammaln(a) - gammaln(b)))


def fit_ggd(samples: np.ndarray) -> GgdParams:
    """Fit a zero-mean generalized Gaussian by moment matching.

    Inverts rho(alpha) = E[x^2] / E[|x|]^2 over the precomputed shape grid;
    the spread comes straight from the second moment.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 64:
        raise PreconditionError(f"need at least 64 samples, have {x.size}")
    if float(x.min()) == float(x.max()):
        raise DegenerateInputError("zero-variance sample set")
    e_abs = float(np.mean(np.abs(x)))
    e_sq = float(np.mean(x * x))
    if e_sq <= 0.0 or e_abs <= 0.0:
        raise DegenerateInputError("zero-variance sample set")
    alpha = _invert_shape_ratio(e_sq / (e_abs * e_abs))
    return GgdParams(alpha=alpha, sigma=float(np.sqrt(e_sq)))


def fit_aggd(samples: np.ndarray) -> AggdParams:
    """Fit a zero-mode asymmetric generalized Gaussian by moment matching.

    The shape inversion uses the side-ratio-corrected moment ratio; the
    correction is evaluated on min(side ratio, 1/side ratio) so mirrored
    inputs recover bitwise-mirrored parameters.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 64:
        raise PreconditionError(f"need at least 64 samples, have {x.size}")
    left = x[x < 0.0]
    right = x[x > 0.0]
    if left.size == 0 or right.size == 0:
        raise DegenerateInputError("one-sided sample set")
    sigma_l = float(np.sqrt(np.mean(left * left)))
    sigma_r = float(np.sqrt(np.mean(right * right)))
    e_abs = float(np.mean(np.abs(x)))
    e_sq = float(np.mean(x * x))
    g = min(sigma_l, sigma_r) / max(sigma_l, sigma_r)
    r_hat = (e_abs * e_abs) / e_sq
    big_r = r_hat * (g**3 + 1.0) * (g + 1.0) / (g**2 + 1.0) ** 2
    # big_r estimates G(2/nu)^2 / (G(1/nu) G(3/nu)) = 1/rho(nu)
    nu = _invert_shape_ratio(1.0 / big_r)
    beta_scale = np.sqrt(_gamma_ratio(1.0 / nu, 3.0 / nu))
    beta_l = sigma_l * beta_scale
    beta_r = sigma_r * beta_scale
    eta = (beta_r - beta_l) * _gamma_ratio(2.0 / nu, 1.0 / nu)
    return AggdParams(nu=nu, eta=float(eta), sigma_l=sigma_l, sigma_r=sigma_r)


# ---------------------------------------------------------------------------
# Neighboring-pixel statistics
# ---------------------------------------------------------------------------


def paired_products(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Products of neighboring coefficients along H, V, D1, D2.

    Outputs shrink by one row/column as needed; nothing is padded so the
    fits never see synthetic correlations.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape[0] < 2 or m.shape[1] < 2:
        raise PreconditionError("need at least a 2x2 map")
    h = m[:, :-1] * m[:, 1:]
    v = m[:-1, :] * m[1:, :]
    d1 = m[:-1, :-1] * m[1:, 1:]
    d2 = m[:-1, 1:] * m[1:, :-1]
    return h, v, d1, d2


def log_derivatives(m: np.ndarray) -> tuple[np.ndarray, ...]:
    """Seven difference stencils of log-compressed absolute coefficients.

    Each stencil is evaluated only where all of its taps exist.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape[0] < 3 or m.shape[1] < 3:
        raise PreconditionError("need at least a 3x3 map")
    z = np.log(np.abs(m) + 0.1)
    d1 = z[:, 1:] - z[:, :-1]
    d2 = z[1:, :] - z[:-1, :]
    d3 = z[1:, 1:] - z[:-1, :-1]
    d4 = z[1:, :-1] - z[:-1, 1:]
    d5 = z[:-2, 1:-1] + z[2:, 1:-1] - z[1:-1, :-2] - z[1:-1, 2:]
    d6 = z[:-1, :-1] + z[1:, 1:] - z[:-1, 1:] - z[1:, :-1]
    d7 = z[:-2, :-2] + z[2:, 2:] - z[:-2, 2:] - z[2:, :-2]
    return d1, d2, d3, d4, d5, d6, d7


def sigma_features(sigma_map: np.ndarray) -> tuple[float, float]:
    """Mean and squared reciprocal coefficient of variation of the
    local-deviation field. A constant field has no spread, so the second
    value is reported as the documented sentinel cap."""
    s = np.asarray(sigma_map, dtype=np.float64)
    if s.size == 0:
        raise PreconditionError("empty deviation field")
    phi = float(np.mean(s))
    omega = float(np.sqrt(np.mean((s - phi) ** 2)))
    if omega == 0.0:
        return phi, SIGMA_FIELD_COV_CAP
    return phi, min((phi / omega) ** 2, SIGMA_FIELD_COV_CAP)


def nss34(img: np.ndarray,
          c: float = MSCN_C,
          half_window: int = MSCN_HALF_WINDOW,
          window_sigma: float = MSCN_SIGMA) -> Nss34Result:
    """The 34-feature statistical summary of one feature map.

    Degenerate sub-fits (flat maps, one-sided products) are replaced with
    neutral defaults and flagged instead of aborting, so one flat chunk
    cannot take down a whole video.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.shape[0] < 16 or img.shape[1] < 16:
        raise PreconditionError(f"map {img.shape} below the 16x16 minimum")
    res = mscn(img, c=c, half_window=half_window, window_sigma=window_sigma)
    values = np.empty(NSS34_DIM, dtype=np.float64)
    degenerate: list[str] = []

    try:
        g = fit_ggd(res.mscn)
        values[0:2] = (g.alpha, g.sigma)
    except DegenerateInputError:
        values[0:2] = GGD_NEUTRAL
        degenerate.append(NSS34_SLOTS[0])

    values[2:4] = sigma_features(res.sigma)

    pos = 4
    for prod in paired_products(res.mscn):
        try:
            a = fit_aggd(prod)
            values[pos:pos + 4] = (a.nu, a.eta, a.sigma_l, a.sigma_r)
        except DegenerateInputError:
            values[pos:pos + 4] = AGGD_NEUTRAL
            degenerate.append(NSS34_SLOTS[pos])
        pos += 4

    for deriv in log_derivatives(res.mscn):
        try:
            g = fit_ggd(deriv)
            values[pos:pos + 2] = (g.alpha, g.sigma)
        except DegenerateInputError:
            values[pos:pos + 2] = GGD_NEUTRAL
            degenerate.append(NSS34_SLOTS[pos])
        pos += 2

    return Nss34Result(values=values, degenerate=tuple(degenerate))
