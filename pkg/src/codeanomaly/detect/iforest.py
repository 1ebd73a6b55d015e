"""Isolation Forest built from scratch on a seeded numpy generator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .scores import AnomalyScoreSet, default_ids, flag_count, top_k

EULER_GAMMA = 0.5772156649015329


class DegenerateData(ValueError):
    pass


def average_path_length(n) -> np.ndarray:
    """Expected unsuccessful-search path length in a BST of n nodes: c(n)."""
    n = np.asarray(n, dtype=np.float64)
    out = np.zeros_like(n)
    big = n > 2
    out[n == 2] = 1.0
    m = n[big]
    out[big] = 2.0 * (np.log(m - 1.0) + EULER_GAMMA) - 2.0 * (m - 1.0) / m
    return out


@dataclass
class _Tree:
    feature: np.ndarray    # -1 marks an external node
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    size: np.ndarray

    def path_lengths(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        depth = np.zeros(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] < self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            depth[idx] += 1
            active[idx] = self.feature[node[idx]] >= 0
        return depth + average_path_length(self.size[node])


def _grow(X: np.ndarray, limit: int, rng: np.random.Generator) -> _Tree:
    feature, threshold, left, right, size = [], [], [], [], []

    def new_node(n: int) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        size.append(n)
        return len(feature) - 1

    root = new_node(X.shape[0])
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        if depth >= limit or len(rows) <= 1:
            continue
        sub = X[rows]
        lo, hi = sub.min(axis=0), sub.max(axis=0)
        # only features that can actually separate these rows
        splittable = np.flatnonzero(hi > lo)
        if splittable.size == 0:
            continue
        f = int(splittable[rng.integers(splittable.size)])
        t = float(rng.uniform(lo[f], hi[f]))
        if t <= lo[f]:
            t = float(np.nextafter(lo[f], hi[f]))
        mask = sub[:, f] < t
        feature[node], threshold[node] = f, t
        li, ri = new_node(int(mask.sum())), new_node(int((~mask).sum()))
        left[node], right[node] = li, ri
        stack.append((li, rows[mask], depth + 1))
        stack.append((ri, rows[~mask], depth + 1))
    return _Tree(np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
                 np.array(right, dtype=np.int64), np.array(size, dtype=np.float64))


class IsolationForest(OutlierMixin, BaseEstimator):
    """Isolation Forest.

    ``normality(X)`` is the mean isolation depth divided by c(max_samples);
    ``score_samples`` returns the usual anomaly score ``2 ** -normality``,
    which lies in (0, 1] and decreases with depth.
    """

    def __init__(self, n_estimators: int = 200, max_samples: int = 256, contamination: float = 0.0001,
                 random_state: int = 0):
        self.n_estimators = n_estimators
        self.max_samples = max_samples
        self.contamination = contamination
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        n = X.shape[0]
        if n < 2 or not (X != X[0]).any():
            raise DegenerateData("isolation needs at least 2 distinct points")
        self.n_features_in_ = X.shape[1]
        self.max_samples_ = min(self.max_samples, n)
        limit = math.ceil(math.log2(self.max_samples_)) if self.max_samples_ > 1 else 0
        rng = np.random.default_rng(self.random_state)
        self.estimators_ = []
        for _ in range(self.n_estimators):
            rows = rng.choice(n, size=self.max_samples_, replace=False)
            self.estimators_.append(_grow(X[rows], limit, rng))
        self.norm_ = float(average_path_length(self.max_samples_))
        return self

    def mean_depth(self, X) -> np.ndarray:
        check_is_fitted(self, "estimators_")
        X = check_array(X, dtype=np.float64)
        total = np.zeros(X.shape[0])
        for tree in self.estimators_:
            total += tree.path_lengths(X)
        return total / len(self.estimators_)

    def normality(self, X) -> np.ndarray:
        return self.mean_depth(X) / self.norm_

    def score_samples(self, X) -> np.ndarray:
        return np.power(2.0, -self.normality(X))

    def predict(self, X) -> np.ndarray:
        norm = self.normality(X)
        ids = default_ids(len(norm), None)
        flagged = set(top_k(ids, norm, flag_count(self.contamination, len(ids)), largest=False))
        return np.array([-1 if u in flagged else 1 for u in ids])


def iforest_fit_score(points, n_estimators: int = 200, max_samples: int = 256,
                      contamination: float = 0.0001, seed: int = 0,
                      unit_ids: Optional[Sequence[str]] = None) -> AnomalyScoreSet:
    X = check_array(points, dtype=np.float64)
    ids = default_ids(X.shape[0], unit_ids)
    forest = IsolationForest(n_estimators, max_samples, contamination, seed).fit(X)
    normality = forest.normality(X)
    scores = np.power(2.0, -normality)
    flagged = top_k(ids, normality, flag_count(contamination, len(ids)), largest=False)
    threshold = float(min(scores[ids.index(u)] for u in flagged)) if flagged else 1.0
    return AnomalyScoreSet("iforest", ids, scores, threshold, flagged,
                           {"n_estimators": n_estimators, "max_samples": forest.max_samples_,
                            "contamination": contamination, "seed": seed},
                           {"normality": normality})
