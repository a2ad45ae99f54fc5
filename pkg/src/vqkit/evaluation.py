"""Evaluation harness: dataset manifests, subjective-score calibration,
rank/linear correlation metrics, and the repeated random-split protocol.

Rank correlations are computed in-house (average-rank Spearman, tie-corrected
Kendall tau-b) so the textbook identities hold exactly on small examples;
the test suite cross-checks them against SciPy.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, DegenerateInputError, PreconditionError, RangeError
from .pipeline import read_features
from .regressor import QualityRegressor, fit_logistic, logistic_apply

MOS_SCALES = {
    "konvid_1to5": (1.0, 5.0),
    "livevqc_0to100": (0.0, 100.0),
    "youtube_1to5": (1.0, 5.0),
}


def calibrate_mos(mos: float, scale: str) -> float:
    """Map a subjective score onto the common 1-5 scale.

    KoNViD-style and LIVE-VQC-style scores get their published affine
    corrections; YouTube-style scores pass through unchanged. Each branch is
    strictly increasing in the input.
    """
    if scale not in MOS_SCALES:
        raise RangeError(f"unknown MOS scale {scale!r}")
    lo, hi = MOS_SCALES[scale]
    if not (lo <= mos <= hi):
        raise RangeError(f"MOS {mos} outside [{lo}, {hi}] for scale {scale}")
    if scale == "konvid_1to5":
        return 5.0 - 4.0 * ((5.0 - mos) / 4.0 * 1.1241 - 0.0993)
    if scale == "livevqc_0to100":
        return 5.0 - 4.0 * ((100.0 - mos) / 100.0 * 0.7132 + 0.0253)
    return float(mos)


# ---------------------------------------------------------------------------
# Correlation metrics
# ---------------------------------------------------------------------------


def _check_pair(x, y, minimum: int = 3) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise PreconditionError("vectors must have equal length")
    if x.size < minimum:
        raise PreconditionError(f"need at least {minimum} pairs, have {x.size}")
    if float(x.min()) == float(x.max()) or float(y.min()) == float(y.max()):
        raise DegenerateInputError("correlation undefined for a constant vector")
    return x, y


def _average_ranks(a: np.ndarray) -> np.ndarray:
    order = np.argsort(a, kind="stable")
    ranks = np.empty(a.size, dtype=np.float64)
    sorted_a = a[order]
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i: j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.sum(xc * xc) * np.sum(yc * yc))
    if denom == 0.0:
        raise DegenerateInputError("correlation undefined for a constant vector")
    return float(np.sum(xc * yc) / denom)


def srcc(x, y) -> float:
    """Spearman rank correlation with average ranks on ties."""
    x, y = _check_pair(x, y)
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    n = x.size
    if np.unique(x).size == n and np.unique(y).size == n:
        d = rx - ry
        return float(1.0 - 6.0 * np.sum(d * d) / (n * (n * n - 1.0)))
    return _pearson(rx, ry)


def krcc(x, y) -> float:
    """Kendall rank correlation, tau-b (tie-corrected)."""
    x, y = _check_pair(x, y)
    n = x.size
    s = 0.0
    tx = 0
    ty = 0
    for i in range(n - 1):
        dx = np.sign(x[i + 1:] - x[i])
        dy = np.sign(y[i + 1:] - y[i])
        s += float(np.sum(dx * dy))
        tx += int(np.sum(dx == 0))
        ty += int(np.sum(dy == 0))
    n0 = n * (n - 1) / 2.0
    denom = np.sqrt((n0 - tx) * (n0 - ty))
    if denom == 0.0:
        raise DegenerateInputError("correlation undefined for a constant vector")
    return float(s / denom)


def plcc_rmse(x, y) -> tuple[float, float]:
    """Pearson correlation and RMSE after the logistic score mapping."""
    x, y = _check_pair(x, y, minimum=8)
    params = fit_logistic(x, y)
    mapped = logistic_apply(params, x)
    rmse = float(np.sqrt(np.mean((mapped - y) ** 2)))
    return _pearson(mapped, y), rmse


# ---------------------------------------------------------------------------
# Dataset manifests
# ---------------------------------------------------------------------------

MANIFEST_COLUMNS = ("video_id", "feature_path", "deep_path", "mos", "mos_scale")


@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    feature_path: str
    deep_path: str | None
    mos: float
    mos_scale: str

    @property
    def calibrated_mos(self) -> float:
        return calibrate_mos(self.mos, self.mos_scale)


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    base_dir: Path

    def __len__(self) -> int:
        return len(self.entries)

    def resolve(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.base_dir / p

    def load_features(self) -> tuple[np.ndarray, np.ndarray]:
        """Feature matrix plus calibrated labels, row-aligned to entries."""
        rows = [read_features(self.resolve(e.feature_path)) for e in self.entries]
        widths = {r.size for r in rows}
        if len(widths) != 1:
            raise DataError(f"feature files disagree on dimension: {sorted(widths)}")
        X = np.stack(rows).astype(np.float64)
        y = np.array([e.calibrated_mos for e in self.entries])
        return X, y


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse the CSV manifest (UTF-8, header row, documented columns)."""
    path = Path(path)
    entries = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"video_id", "feature_path", "mos", "mos_scale"} - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: manifest missing columns {sorted(missing)}")
        for line, row in enumerate(reader, start=2):
            vid = row["video_id"].strip()
            if vid in seen:
                raise DataError(f"{path}:{line}: duplicate video_id {vid!r}")
            seen.add(vid)
            try:
                mos = float(row["mos"])
            except ValueError:
                raise DataError(f"{path}:{line}: bad MOS value {row['mos']!r}")
            entry = ManifestEntry(
                video_id=vid,
                feature_path=row["feature_path"].strip(),
                deep_path=(row.get("deep_path") or "").strip() or None,
                mos=mos,
                mos_scale=row["mos_scale"].strip(),
            )
            entry.calibrated_mos  # validates scale name and range eagerly
            entries.append(entry)
    if not entries:
        raise DataError(f"{path}: empty manifest")
    return DatasetManifest(tuple(entries), path.resolve().parent)


def write_manifest(path: str | Path, entries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_COLUMNS)
        for e in entries:
            writer.writerow([e.video_id, e.feature_path, e.deep_path or "",
                             repr(e.mos), e.mos_scale])


# ---------------------------------------------------------------------------
# Repeated-split protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    iterations: tuple[dict, ...]
    median_srcc: float
    median_krcc: float
    median_plcc: float
    median_rmse: float
    seed: int
    train_frac: float
    n_items: int
    regressor_params: dict

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def run_protocol(features: np.ndarray,
                 mos: np.ndarray,
                 iterations: int = 20,
                 train_frac: float = 0.8,
                 seed: int = 0,
                 regressor_params: dict | None = None) -> EvalReport:
    """Repeated seeded 80/20 shuffle-splits; per-iteration metrics and medians.

    Split streams come from a PCG64 generator seeded through a spawned
    SeedSequence per iteration, so reports reproduce across platforms.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(mos, dtype=np.float64).ravel()
    n = X.shape[0]
    if n < 50:
        raise PreconditionError(f"protocol needs at least 50 items, have {n}")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise DataError("features or labels contain non-finite values")
    params = dict(regressor_params or {})

    children = np.random.SeedSequence(seed).spawn(iterations)
    rows = []
    for it in range(iterations):
        rng = np.random.Generator(np.random.PCG64(children[it]))
        perm = rng.permutation(n)
        n_train = int(round(train_frac * n))
        train_idx, test_idx = perm[:n_train], perm[n_train:]
        model_seed = int(children[it].generate_state(1)[0])
        model = QualityRegressor(random_state=model_seed, **params)
        model.fit(X[train_idx], y[train_idx])
        pred = model.predict(X[test_idx])
        row = {"iteration": it, "n_train": int(n_train), "n_test": int(n - n_train)}
        try:
            row["srcc"] = srcc(pred, y[test_idx])
            row["krcc"] = krcc(pred, y[test_idx])
            row["plcc"], row["rmse"] = plcc_rmse(pred, y[test_idx])
        except DegenerateInputError:
            # A collapsed predictor has no defined correlation; keep the
            # iteration visible instead of silently dropping it.
            row.setdefault("srcc", float("nan"))
            row.setdefault("krcc", float("nan"))
            row.setdefault("plcc", float("nan"))
            row.setdefault("rmse", float("nan"))
        rows.append(row)

    def median_of(key: str) -> float:
        return float(np.nanmedian([r[key] for r in rows]))

    return EvalReport(
        iterations=tuple(rows),
        median_srcc=median_of("srcc"),
        median_krcc=median_of("krcc"),
        median_plcc=median_of("plcc"),
        median_rmse=median_of("rmse"),
        seed=seed,
        train_frac=train_frac,
        n_items=n,
        regressor_params=params,
    )


def run_protocol_manifest(manifest: DatasetManifest, **kwargs) -> EvalReport:
    X, y = manifest.load_features()
    return run_protocol(X, y, **kwargs)
