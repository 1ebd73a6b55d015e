"""Local Outlier Factor with tie-inclusive k-distance neighborhoods."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .scores import AnomalyScoreSet, TooFewPoints, default_ids, flag_count, top_k

_CHUNK = 512


def _ratio(num: float, den: float) -> float:
    # densities may be infinite where k-distance is 0 (duplicate points)
    if np.isinf(num) and np.isinf(den):
        return 1.0
    if np.isinf(den):
        return 0.0
    return num / den


def local_outlier_factor(X: np.ndarray, k: int) -> np.ndarray:
    """LOF of every row of ``X`` against the others.

    The k-neighborhood of p holds every other point within p's k-distance,
    so it can exceed k points when distances tie.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < k + 1:
        raise TooFewPoints(f"LOF with k={k} needs at least {k + 1} points, got {n}")
    kdist = np.empty(n)
    for lo in range(0, n, _CHUNK):
        D = cdist(X[lo:lo + _CHUNK], X)
        D[np.arange(D.shape[0]), np.arange(lo, lo + D.shape[0])] = np.inf
        kdist[lo:lo + D.shape[0]] = np.partition(D, k - 1, axis=1)[:, k - 1]

    neighbors: list[np.ndarray] = []
    lrd = np.empty(n)
    for lo in range(0, n, _CHUNK):
        D = cdist(X[lo:lo + _CHUNK], X)
        for r in range(D.shape[0]):
            p = lo + r
            row = D[r]
            row[p] = np.inf
            nb = np.flatnonzero(row <= kdist[p])
            neighbors.append(nb)
            mean_reach = np.maximum(kdist[nb], row[nb]).mean()
            lrd[p] = np.inf if mean_reach == 0 else 1.0 / mean_reach

    out = np.empty(n)
    for p in range(n):
        nb_lrd = lrd[neighbors[p]]
        mean_nb = np.inf if np.isinf(nb_lrd).any() else nb_lrd.mean()
        out[p] = _ratio(mean_nb, lrd[p])
    return out


def lof_scores(points, n_neighbors: int = 20, contamination: float = 0.001,
               unit_ids: Optional[Sequence[str]] = None) -> AnomalyScoreSet:
    X = check_array(points, dtype=np.float64)
    ids = default_ids(X.shape[0], unit_ids)
    scores = local_outlier_factor(X, n_neighbors)
    flagged = top_k(ids, scores, flag_count(contamination, len(ids)), largest=True)
    threshold = float(min(scores[ids.index(u)] for u in flagged)) if flagged else float("inf")
    return AnomalyScoreSet("lof", ids, scores, threshold, flagged,
                           {"n_neighbors": n_neighbors, "contamination": contamination})


class LocalOutlierFactor(OutlierMixin, BaseEstimator):
    """Transductive LOF: ``fit`` scores the training set, ``predict`` returns -1 for flagged rows."""

    def __init__(self, n_neighbors: int = 20, contamination: float = 0.001):
        self.n_neighbors = n_neighbors
        self.contamination = contamination

    def fit(self, X, y=None, unit_ids: Optional[Sequence[str]] = None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.score_set_ = lof_scores(X, self.n_neighbors, self.contamination, unit_ids)
        self.negative_outlier_factor_ = -self.score_set_.scores
        return self

    def fit_predict(self, X, y=None, unit_ids: Optional[Sequence[str]] = None) -> np.ndarray:
        self.fit(X, unit_ids=unit_ids)
        flagged = set(self.score_set_.flagged)
        return np.array([-1 if u in flagged else 1 for u in self.score_set_.unit_ids])

    def predict(self, X=None) -> np.ndarray:
        check_is_fitted(self, "score_set_")
        flagged = set(self.score_set_.flagged)
        return np.array([-1 if u in flagged else 1 for u in self.score_set_.unit_ids])
