from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codeanomaly.preprocess import CovariancePCA, DegenerateCovariance, DimensionMismatch, MetricScaler
from oracles import pca_reference


def test_constant_column_maps_to_zero():
    X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
    assert np.array_equal(MetricScaler().fit_transform(X)[:, 0], np.zeros(3))


def test_population_variance():
    out = MetricScaler().fit_transform(np.array([[0.0], [2.0]]))
    assert out.ravel().tolist() == [-1.0, 1.0]


def test_binary_columns_scaled_by_default():
    X = np.zeros((4, 51))
    X[:, 0] = [1, 2, 3, 4]
    X[:, 49] = [0, 1, 0, 1]
    assert MetricScaler().fit_transform(X)[:, 49].tolist() == [-1.0, 1.0, -1.0, 1.0]
    assert MetricScaler(scale_binary=False).fit_transform(X)[:, 49].tolist() == [0, 1, 0, 1]


def test_scaler_width_check_and_persistence():
    s = MetricScaler().fit(np.arange(6.0).reshape(3, 2))
    with pytest.raises(DimensionMismatch):
        s.transform(np.zeros((1, 3)))
    again = MetricScaler.from_dict(s.to_dict())
    assert np.array_equal(again.transform(np.ones((1, 2))), s.transform(np.ones((1, 2))))


def test_rank_one_data():
    t = np.linspace(-3, 5, 40)[:, None]
    X = t @ np.array([[1.0, -2.0, 0.5]]) + np.array([4.0, 1.0, -1.0])
    pca = CovariancePCA(1).fit(X)
    assert pca.explained_variance_ratio_[0] == pytest.approx(1.0, abs=1e-9)


def test_identical_points_are_degenerate():
    with pytest.raises(DegenerateCovariance):
        CovariancePCA(2).fit(np.ones((10, 4)))


@pytest.mark.parametrize("seed", range(5))
def test_matches_svd_oracle(seed):
    X = np.random.default_rng(seed).normal(size=(60, 8)) @ np.diag(np.arange(1, 9.0))
    for k in (1, 4, 8):
        pca = CovariancePCA(k).fit(X)
        ref, ratio, _ = pca_reference(X, k)
        for got, want in zip(pca.components_, ref):
            assert min(np.abs(got - want).max(), np.abs(got + want).max()) < 1e-6
        assert np.allclose(pca.explained_variance_ratio_, ratio, atol=1e-6)


def test_default_is_twenty_components():
    assert CovariancePCA().n_components == 20


def test_sign_canonicalization():
    X = np.random.default_rng(3).normal(size=(50, 6))
    pca = CovariancePCA(6).fit(X)
    for row in pca.components_:
        assert row[np.argmax(np.abs(row))] >= 0
    flipped = CovariancePCA(6).fit(-X)
    assert np.allclose(np.abs(pca.components_), np.abs(flipped.components_))


@given(st.integers(0, 10_000), st.integers(1, 7))
def test_reconstruction_error_equals_dropped_eigenvalues(seed, k):
    X = np.random.default_rng(seed).normal(size=(40, 7)) * np.arange(1, 8.0)
    pca = CovariancePCA(k).fit(X)
    err = np.sum((pca.inverse_transform(pca.transform(X)) - X) ** 2) / X.shape[0]
    assert err == pytest.approx(pca.all_eigenvalues_[k:].sum(), abs=1e-6)


@given(st.integers(0, 10_000), st.floats(-5, 5), st.floats(-5, 5))
def test_transform_is_affine(seed, a, b):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(30, 5))
    pca = CovariancePCA(3).fit(X)
    x, y = rng.normal(size=(2, 5))
    T = lambda v: pca.transform(v[None])[0]  # noqa: E731
    origin = T(np.zeros(5))
    lhs = T(a * x + b * y) - origin
    rhs = a * (T(x) - origin) + b * (T(y) - origin)
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_pca_persistence():
    X = np.random.default_rng(1).normal(size=(30, 5))
    pca = CovariancePCA(2).fit(X)
    again = CovariancePCA.from_dict(pca.to_dict())
    assert np.array_equal(again.transform(X), pca.transform(X))
