"""Quality prediction head: feature standardization, an RBF-kernel support
vector regressor with randomized hyperparameter search, and the four-parameter
logistic mapping used to linearize raw scores against subjective values.

The estimator follows the scikit-learn fit/predict contract so it composes
with the wider ecosystem; prediction itself is an explicit kernel expansion
over the stored support vectors, which keeps saved and in-memory models
bit-for-bit interchangeable.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.svm import SVR
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import DataError, DegenerateInputError, PreconditionError, ShapeError

MODEL_FORMAT = "vqkit-model"
MODEL_VERSION = 1

DEFAULT_C_RANGE = (2.0**-5, 2.0**15)
DEFAULT_GAMMA_RANGE = (2.0**-15, 2.0**3)


class QualityRegressor(BaseEstimator, RegressorMixin):
    """Standardize, search (C, gamma) log-uniformly, fit an epsilon-SVR.

    Parameters
    ----------
    search_budget : number of (C, gamma) candidates; ignored when both
        ``C`` and ``gamma`` are fixed.
    C, gamma : optional fixed hyperparameters; both must be given to skip
        the search.
    epsilon : insensitive-tube width on standardized labels.
    folds : cross-validation folds used to score candidates by RMSE.
    random_state : seeds both the candidate sampling and the fold shuffle.
    """

    def __init__(self,
                 search_budget: int = 50,
                 C: float | None = None,
                 gamma: float | None = None,
                 epsilon: float = 0.1,
                 folds: int = 5,
                 random_state: int = 0,
                 c_range: tuple[float, float] = DEFAULT_C_RANGE,
                 gamma_range: tuple[float, float] = DEFAULT_GAMMA_RANGE):
        self.search_budget = search_budget
        self.C = C
        self.gamma = gamma
        self.epsilon = epsilon
        self.folds = folds
        self.random_state = random_state
        self.c_range = c_range
        self.gamma_range = gamma_range

    # -- fitting -----------------------------------------------------------

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2:
            raise PreconditionError("X must be 2D (items x features)")
        if not np.isfinite(X).all() or not np.isfinite(y).all():
            raise DataError("training data contains non-finite values")
        if X.shape[0] < 20:
            raise PreconditionError(f"need at least 20 training items, have {X.shape[0]}")
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)

        self.feature_mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.zero_variance_dims_ = np.flatnonzero(std == 0.0)
        std = np.where(std == 0.0, 1.0, std)
        self.feature_std_ = std
        self.label_mean_ = float(y.mean())
        y_std = float(y.std())
        self.label_std_ = y_std if y_std > 0.0 else 1.0

        Xs = (X - self.feature_mean_) / self.feature_std_
        ys = (y - self.label_mean_) / self.label_std_

        candidates = self._candidates()
        if len(candidates) == 1:
            self.best_params_ = candidates[0]
            self.cv_rmse_ = None
        else:
            self.best_params_, self.cv_rmse_ = self._search(Xs, ys, candidates)

        c, g = self.best_params_
        svr = SVR(kernel="rbf", C=c, gamma=g, epsilon=self.epsilon)
        svr.fit(Xs, ys)
        self.support_vectors_ = svr.support_vectors_.copy()
        self.dual_coef_ = svr.dual_coef_.ravel().copy()
        self.intercept_ = float(svr.intercept_[0])
        self.logistic_params_ = None  # stale mappings die with the old scores
        self.n_features_in_ = X.shape[1]
        return self

    def _candidates(self) -> list[tuple[float, float]]:
        if self.C is not None and self.gamma is not None:
            return [(float(self.C), float(self.gamma))]
        rng = np.random.default_rng(self.random_state)
        lo_c, hi_c = np.log(self.c_range)
        lo_g, hi_g = np.log(self.gamma_range)
        cs = np.exp(rng.uniform(lo_c, hi_c, self.search_budget))
        gs = np.exp(rng.uniform(lo_g, hi_g, self.search_budget))
        if self.C is not None:
            cs = np.full(self.search_budget, float(self.C))
        if self.gamma is not None:
            gs = np.full(self.search_budget, float(self.gamma))
        return list(zip(cs.tolist(), gs.tolist()))

    def _search(self, Xs, ys, candidates):
        rng = np.random.default_rng(self.random_state)
        order = rng.permutation(Xs.shape[0])
        folds = np.array_split(order, self.folds)
        best = None
        best_rmse = np.inf
        for c, g in candidates:
            errors = []
            for k in range(self.folds):
                test_idx = folds[k]
                train_idx = np.concatenate([folds[j] for j in range(self.folds) if j != k])
                svr = SVR(kernel="rbf", C=c, gamma=g, epsilon=self.epsilon)
                svr.fit(Xs[train_idx], ys[train_idx])
                pred = svr.predict(Xs[test_idx])
                errors.append(np.mean((pred - ys[test_idx]) ** 2))
            rmse = float(np.sqrt(np.mean(errors)))
            if rmse < best_rmse:
                best, best_rmse = (c, g), rmse
        return best, best_rmse

    # -- prediction --------------------------------------------------------

    def predict(self, X) -> np.ndarray:
        """Raw scores: explicit RBF expansion over the stored support vectors."""
        check_is_fitted(self, "support_vectors_")
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"feature vector has {X.shape[1]} dims, model expects {self.n_features_in_}"
            )
        X = check_array(X, dtype=np.float64)
        Xs = (X - self.feature_mean_) / self.feature_std_
        _, gamma = self.best_params_
        d2 = (
            np.sum(Xs * Xs, axis=1)[:, None]
            + np.sum(self.support_vectors_ ** 2, axis=1)[None, :]
            - 2.0 * Xs @ self.support_vectors_.T
        )
        scores = np.exp(-gamma * np.clip(d2, 0.0, None)) @ self.dual_coef_ + self.intercept_
        scores = scores * self.label_std_ + self.label_mean_
        return scores[0] if single else scores

    # -- persistence -------------------------------------------------------

    def save(self, path: str | Path) -> None:
        save_model(self, path)


def _encode(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype="<f8")
    return {"shape": list(a.shape), "data": base64.b64encode(a.tobytes()).decode("ascii")}


def _decode(doc: dict) -> np.ndarray:
    data = base64.b64decode(doc["data"])
    return np.frombuffer(data, dtype="<f8").reshape(doc["shape"]).copy()


def save_model(model: QualityRegressor, path: str | Path) -> None:
    check_is_fitted(model, "support_vectors_")
    c, g = model.best_params_
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kernel": "rbf",
        "C": c,
        "gamma": g,
        "epsilon": model.epsilon,
        "feature_mean": _encode(model.feature_mean_),
        "feature_std": _encode(model.feature_std_),
        "zero_variance_dims": model.zero_variance_dims_.tolist(),
        "label_mean": model.label_mean_,
        "label_std": model.label_std_,
        "support_vectors": _encode(model.support_vectors_),
        "dual_coef": _encode(model.dual_coef_),
        "intercept": model.intercept_,
        "logistic_params": list(model.logistic_params_) if model.logistic_params_ is not None else None,
        "search": {
            "budget": model.search_budget,
            "seed": model.random_state,
            "folds": model.folds,
            "c_range": list(model.c_range),
            "gamma_range": list(model.gamma_range),
            "cv_rmse": model.cv_rmse_,
        },
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_model(path: str | Path) -> QualityRegressor:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != MODEL_FORMAT:
        raise DataError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise DataError(f"{path}: unsupported model version {doc.get('version')}")
    search = doc.get("search", {})
    model = QualityRegressor(
        search_budget=search.get("budget", 1),
        C=doc["C"],
        gamma=doc["gamma"],
        epsilon=doc["epsilon"],
        folds=search.get("folds", 5),
        random_state=search.get("seed", 0),
        c_range=tuple(search.get("c_range", DEFAULT_C_RANGE)),
        gamma_range=tuple(search.get("gamma_range", DEFAULT_GAMMA_RANGE)),
    )
    model.best_params_ = (doc["C"], doc["gamma"])
    model.cv_rmse_ = search.get("cv_rmse")
    model.feature_mean_ = _decode(doc["feature_mean"]).ravel()
    model.feature_std_ = _decode(doc["feature_std"]).ravel()
    model.zero_variance_dims_ = np.asarray(doc["zero_variance_dims"], dtype=np.int64)
    model.label_mean_ = doc["label_mean"]
    model.label_std_ = doc["label_std"]
    model.support_vectors_ = _decode(doc["support_vectors"])
    model.dual_coef_ = _decode(doc["dual_coef"]).ravel()
    model.intercept_ = doc["intercept"]
    model.logistic_params_ = (
        tuple(doc["logistic_params"]) if doc["logistic_params"] is not None else None
    )
    model.n_features_in_ = model.feature_mean_.size
    return model


# ---------------------------------------------------------------------------
# Logistic mapping
# ---------------------------------------------------------------------------


def logistic_apply(params, x: np.ndarray) -> np.ndarray:
    b1, b2, b3, b4 = params
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        return b2 + (b1 - b2) / (1.0 + np.exp(-(x - b3) / abs(b4)))


def fit_logistic(raw_scores, mos,
                 rel_tol: float = 1e-8,
                 max_iter: int = 500) -> tuple[float, float, float, float]:
    """Least-squares fit of the four-parameter logistic score mapping.

    Initialization anchors the asymptotes at the label extremes and centers
    the knee on the score mean; the returned parameters are whichever of the
    initialization and the converged point has the smaller residual.
    """
    x = np.asarray(raw_scores, dtype=np.float64).ravel()
    y = np.asarray(mos, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ShapeError("scores and labels must have equal length")
    if x.size < 8:
        raise PreconditionError(f"need at least 8 pairs, have {x.size}")
    if float(x.min()) == float(x.max()):
        raise DegenerateInputError("constant scores cannot anchor a logistic fit")

    x0 = np.array([y.max(), y.min(), x.mean(), x.std() / 4.0])

    def residual(b):
        return logistic_apply(b, x) - y

    result = least_squares(residual, x0, xtol=rel_tol, ftol=rel_tol,
                           gtol=None, max_nfev=max_iter)
    candidates = [x0, result.x]
    sse = [float(np.sum(residual(b) ** 2)) for b in candidates]
    best = candidates[int(np.argmin(sse))]
    return float(best[0]), float(best[1]), float(best[2]), float(abs(best[3]))
