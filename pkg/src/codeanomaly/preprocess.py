"""Standardization and principal component projection of metric vectors."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .features.metrics import BINARY_SLOTS


class DimensionMismatch(ValueError):
    pass


class DegenerateCovariance(ValueError):
    pass


def _check_width(est, X: np.ndarray) -> None:
    if X.shape[1] != est.n_features_in_:
        raise DimensionMismatch(f"expected {est.n_features_in_} features, got {X.shape[1]}")


class MetricScaler(TransformerMixin, BaseEstimator):
    """Zero mean, unit population variance per column.

    Constant columns map to 0. With ``scale_binary=False`` the columns in
    ``binary_slots`` pass through untouched.
    """

    def __init__(self, scale_binary: bool = True, binary_slots: Optional[Sequence[int]] = BINARY_SLOTS):
        self.scale_binary = scale_binary
        self.binary_slots = binary_slots

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if X.shape[0] < 2:
            raise ValueError("need at least 2 vectors to fit a scaler")
        self.n_features_in_ = X.shape[1]
        self.mean_ = X.mean(axis=0)
        self.scale_ = X.std(axis=0)
        if not self.scale_binary and self.binary_slots:
            slots = [s for s in self.binary_slots if s < self.n_features_in_]
            self.mean_[slots] = 0.0
            self.scale_[slots] = 1.0
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "mean_")
        X = check_array(X, dtype=np.float64)
        _check_width(self, X)
        safe = np.where(self.scale_ > 0, self.scale_, 1.0)
        out = (X - self.mean_) / safe
        out[:, self.scale_ == 0] = 0.0
        return out

    def inverse_transform(self, Z) -> np.ndarray:
        check_is_fitted(self, "mean_")
        return np.asarray(Z, dtype=np.float64) * self.scale_ + self.mean_

    def to_dict(self) -> dict:
        return {"mean": self.mean_.tolist(), "scale": self.scale_.tolist(),
                "scale_binary": self.scale_binary}

    @classmethod
    def from_dict(cls, d: dict) -> MetricScaler:
        s = cls(scale_binary=d["scale_binary"])
        s.mean_ = np.asarray(d["mean"], dtype=np.float64)
        s.scale_ = np.asarray(d["scale"], dtype=np.float64)
        s.n_features_in_ = len(s.mean_)
        return s


class CovariancePCA(TransformerMixin, BaseEstimator):
    """PCA from the eigendecomposition of the population covariance matrix.

    Each component is sign-fixed so its largest-magnitude entry is
    non-negative (ties go to the first such entry), which makes projections
    reproducible across LAPACK builds.
    """

    def __init__(self, n_components: int = 20):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        n, d = X.shape
        k = self.n_components
        if not 1 <= k <= min(n, d):
            raise ValueError(f"n_components={k} must be in [1, min(n_samples, n_features)={min(n, d)}]")
        self.n_features_in_ = d
        self.mean_ = X.mean(axis=0)
        C = X - self.mean_
        cov = C.T @ C / n
        evals, evecs = np.linalg.eigh(cov)
        evals = np.clip(evals[::-1], 0.0, None)
        evecs = evecs[:, ::-1]
        total = evals.sum()
        if total <= 0 or not np.isfinite(total):
            raise DegenerateCovariance("all points identical; covariance is zero")
        comps = evecs[:, :k].T.copy()
        lead = np.argmax(np.abs(comps), axis=1)
        signs = np.sign(comps[np.arange(k), lead])
        signs[signs == 0] = 1.0
        self.components_ = comps * signs[:, None]
        self.explained_variance_ = evals[:k]
        self.explained_variance_ratio_ = evals[:k] / total
        self.all_eigenvalues_ = evals
        return self

    @property
    def cumulative_explained_variance_(self) -> float:
        check_is_fitted(self, "components_")
        return float(self.explained_variance_ratio_.sum())

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        _check_width(self, X)
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z) -> np.ndarray:
        check_is_fitted(self, "components_")
        return np.asarray(Z, dtype=np.float64) @ self.components_ + self.mean_

    def to_dict(self) -> dict:
        return {"n_components": self.n_components, "mean": self.mean_.tolist(),
                "components": self.components_.tolist(),
                "explained_variance": self.explained_variance_.tolist(),
                "explained_variance_ratio": self.explained_variance_ratio_.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> CovariancePCA:
        p = cls(d["n_components"])
        p.mean_ = np.asarray(d["mean"], dtype=np.float64)
        p.components_ = np.asarray(d["components"], dtype=np.float64)
        p.explained_variance_ = np.asarray(d["explained_variance"], dtype=np.float64)
        p.explained_variance_ratio_ = np.asarray(d["explained_variance_ratio"], dtype=np.float64)
        p.n_features_in_ = len(p.mean_)
        return p
