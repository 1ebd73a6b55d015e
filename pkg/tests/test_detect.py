from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from codeanomaly.detect import (BYTECODE_LOUD, SOURCE_LOUD, AnomalyScoreSet, Autoencoder, DegenerateData,
                                DimensionMismatch, IsolationForest, LocalOutlierFactor, NoLinkedUnits,
                                NonFiniteLoss, TooFewPoints, autoencoder_score, autoencoder_train,
                                average_path_length, compiler_induced_detect, flag_count, hidden_width,
                                iforest_fit_score, local_outlier_factor, lof_scores, normalize, rms_flag,
                                rms_threshold, top_k)
from oracles import lof_reference, numeric_gradients, relative_error


# --- LOF ---

def test_identical_points_score_one():
    assert local_outlier_factor(np.ones((30, 2)), 5).tolist() == [1.0] * 30


def test_far_point_has_largest_score():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(scale=0.5, size=(50, 2)), [[100.0, 0.0]]])
    scores = local_outlier_factor(X, 5)
    assert np.argmax(scores) == 50 and (scores[:50] < scores[50]).all()
    assert np.allclose(scores, lof_reference(X, 5), atol=1e-9)


def test_contamination_flags_one_in_a_thousand():
    X = np.random.default_rng(1).normal(size=(1000, 3))
    assert len(lof_scores(X, 20, 0.001).flagged) == 1


@pytest.mark.parametrize("seed,k", [(0, 2), (1, 5), (2, 20), (3, 3)])
def test_lof_matches_reference(seed, k):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(rng.integers(k + 1, 80), rng.integers(1, 6)))
    assert np.max(np.abs(local_outlier_factor(X, k) - lof_reference(X, k))) < 1e-9


def test_lof_with_ties_matches_reference():
    # integer grid points produce many equal distances
    X = np.random.default_rng(4).integers(0, 4, size=(40, 2)).astype(float)
    assert np.allclose(local_outlier_factor(X, 3), lof_reference(X, 3), atol=1e-9, equal_nan=False)


def test_uniform_grid_interior_scores_near_one():
    g = np.array([(i, j) for i in range(21) for j in range(21)], dtype=float)
    scores = local_outlier_factor(g, 8)
    interior = (g.min(axis=1) >= 5) & (g.max(axis=1) <= 15)
    assert np.all(np.abs(scores[interior] - 1) < 0.05)


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        local_outlier_factor(np.zeros((3, 2)), 5)


def test_lof_estimator_api():
    X = np.vstack([np.random.default_rng(0).normal(size=(99, 2)), [[40.0, 40.0]]])
    est = LocalOutlierFactor(n_neighbors=10, contamination=0.01)
    labels = est.fit_predict(X)
    assert labels[-1] == -1 and (labels[:-1] == 1).all()
    assert est.get_params() == {"n_neighbors": 10, "contamination": 0.01}


# --- Isolation Forest ---

def test_planted_outlier_between_two_clusters():
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        X = np.vstack([rng.normal(size=(100, 2)), rng.normal(size=(100, 2)) + [10, 0], [[5, 50]]])
        normality = iforest_fit_score(X, seed=seed).extra["normality"]
        assert np.argmin(normality) == 200, seed


def test_ten_thousand_points_one_flagged():
    X = np.random.default_rng(0).normal(size=(10_000, 3))
    assert len(iforest_fit_score(X, contamination=0.0001).flagged) == 1


def test_duplicates_cannot_be_isolated():
    with pytest.raises(DegenerateData):
        iforest_fit_score(np.tile([1.0, 2.0], (100, 1)))


def test_forest_is_deterministic():
    X = np.random.default_rng(5).normal(size=(300, 4))
    a = iforest_fit_score(X, seed=7).scores
    b = iforest_fit_score(X, seed=7).scores
    assert a.tobytes() == b.tobytes()
    assert iforest_fit_score(X, seed=8).scores.tobytes() != a.tobytes()


def test_normality_falls_as_outlier_moves_away():
    # distances in cluster radii; far beyond ~8 radii the expected change is below seed noise
    ladder = (1.2, 1.6, 2.4, 3.2, 4.8)
    held = np.zeros(len(ladder) - 1, dtype=int)
    for seed in range(20):
        base = np.random.default_rng(seed).normal(size=(200, 2))
        radius = np.linalg.norm(base, axis=1).max()
        norm = [iforest_fit_score(np.vstack([base, [[d * radius, 0]]]), seed=seed).extra["normality"][-1]
                for d in ladder]
        held += [a >= b for a, b in zip(norm, norm[1:])]
    assert (held >= 18).all(), held


def test_average_path_length():
    assert average_path_length(1) == 0 and average_path_length(2) == 1
    n = 256
    expected = 2 * (math.log(n - 1) + 0.5772156649015329) - 2 * (n - 1) / n
    assert average_path_length(n) == pytest.approx(expected)


def test_forest_estimator_api():
    X = np.vstack([np.random.default_rng(2).normal(size=(199, 2)), [[30.0, 30.0]]])
    est = IsolationForest(n_estimators=50, contamination=0.005, random_state=1).fit(X)
    assert est.predict(X)[-1] == -1
    s = est.score_samples(X)
    assert np.argmax(s) == 199 and ((s > 0) & (s <= 1)).all()


# --- autoencoder ---

def test_hidden_width():
    assert hidden_width(4560, 0.5) == 2280
    assert hidden_width(15982, 0.25) == math.ceil(15982 * 0.25)


def test_gradients_match_central_differences():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(16, 10))
    model = Autoencoder(0.5, epochs=1, batch_size=4, seed=3).fit(X)
    _, analytic = model.loss_and_grads(X)
    numeric = numeric_gradients(lambda: model.loss_and_grads(X)[0], model.params_)
    for a, n in zip(analytic, numeric):
        assert relative_error(a, n) < 1e-4


def test_constant_corpus_loss_never_rises():
    X = np.tile(np.random.default_rng(1).uniform(0, 3, 10), (500, 1))
    model = Autoencoder(0.5, epochs=5, batch_size=8, seed=0).fit(X)
    h = model.loss_history_
    assert len(h) == 5 and all(b <= a for a, b in zip(h, h[1:]))


def test_repeated_vector_is_learned():
    v = np.random.default_rng(2).uniform(0, 3, 10)
    model = autoencoder_train(np.tile(v, (1000, 1)), 0.5, 5, 16)
    assert autoencoder_score(model, v) < 0.1 * np.linalg.norm(v)


def test_zero_vector_score_is_output_norm():
    model = Autoencoder(0.5, epochs=1, seed=0).fit(np.random.default_rng(0).normal(size=(20, 6)))
    zero = np.zeros((1, 6))
    assert model.score(zero)[0] == pytest.approx(np.linalg.norm(model.reconstruct(zero)[0]))
    assert math.isfinite(model.score(zero)[0])


def test_score_is_euclidean_distance():
    X = np.random.default_rng(3).normal(size=(20, 6))
    model = Autoencoder(0.5, epochs=2, batch_size=5, seed=0).fit(X)
    expected = np.sqrt(((model.reconstruct(X) - X) ** 2).sum(axis=1))
    assert np.allclose(model.score(X), expected)


def test_sparse_and_dense_inputs_agree():
    X = np.random.default_rng(4).poisson(0.3, size=(50, 12)).astype(float)
    dense = Autoencoder(0.5, epochs=3, batch_size=7, seed=1).fit(X)
    sparse = Autoencoder(0.5, epochs=3, batch_size=7, seed=1).fit(sp.csr_matrix(X))
    assert np.allclose(dense.score(X), sparse.score(sp.csr_matrix(X)))


def test_dimension_mismatch():
    model = Autoencoder(epochs=1).fit(np.ones((4, 3)) + np.eye(4, 3))
    with pytest.raises(DimensionMismatch):
        model.score(np.ones((1, 4)))


def test_divergence_aborts_with_history():
    X = np.random.default_rng(5).normal(scale=1e3, size=(64, 8))
    with pytest.raises(NonFiniteLoss) as err:
        Autoencoder(0.5, epochs=5, batch_size=4, learning_rate=10.0, seed=0).fit(X)
    assert err.value.epoch >= 0


def test_autoencoder_params():
    assert Autoencoder().get_params() == {"compression_rate": 0.5, "epochs": 5, "batch_size": 1024,
                                          "learning_rate": 0.01, "optimizer": "sgd", "seed": 0,
                                          "shuffle": True}


def test_adam_option_trains():
    X = np.random.default_rng(6).normal(size=(64, 8))
    model = Autoencoder(0.5, epochs=5, batch_size=16, optimizer="adam", seed=0).fit(X)
    assert model.loss_history_[-1] < model.loss_history_[0]


# --- RMS rule ---

def test_equal_scores_flag_nothing():
    threshold, mask = rms_threshold(np.full(8, 2.0), 3.0)
    assert threshold == pytest.approx(6.0) and not mask.any()


def test_rms_hand_example():
    threshold, mask = rms_threshold(np.array([1.0, 1.0, 1.0, 10.0]), 3.0)
    assert threshold == pytest.approx(3 * math.sqrt(25.75))
    assert threshold == pytest.approx(15.2234, abs=1e-4)
    assert not mask.any()


def test_rms_flags_strictly_above():
    scores = np.array([1.0] * 99 + [100.0])
    s = rms_flag(scores, "autoencoder-0.5", 3.0)
    assert s.flagged == [s.unit_ids[-1]]
    assert s.threshold == pytest.approx(3 * math.sqrt((99 + 100 ** 2) / 100))


# --- contamination and score sets ---

@given(st.lists(st.integers(0, 5), min_size=1, max_size=200), st.floats(0.001, 0.5))
def test_contamination_exactness_with_ties(values, c):
    ids = [f"u{i:03d}" for i in range(len(values))]
    keys = np.array(values, dtype=float)
    k = flag_count(c, len(ids))
    assert k == math.ceil(round(c * len(ids), 9))
    chosen = top_k(ids, keys, k, largest=True)
    assert len(chosen) == k
    order = sorted(range(len(ids)), key=lambda i: (-keys[i], ids[i]))
    assert chosen == [ids[i] for i in order[:k]]


@pytest.mark.parametrize("c", [0.0, -0.1, 0.6])
def test_contamination_bounds(c):
    with pytest.raises(ValueError):
        flag_count(c, 100)


def test_score_set_file_round_trip(tmp_path):
    s = AnomalyScoreSet("lof", ["a", "b"], np.array([1.0, float("inf")]), float("inf"), ["b"], {"k": 1})
    s.save(tmp_path / "s.json")
    back = AnomalyScoreSet.load(tmp_path / "s.json")
    assert back.unit_ids == ["a", "b"] and back.flagged == ["b"] and math.isinf(back.scores[1])


# --- compiler-induced rule ---

LINKS = {"cls-a": ["fn-a"]}


def detect_pair(tree, byte, delta=0.8):
    return compiler_induced_detect({"fn-a": tree}, {"cls-a": byte}, LINKS, delta, normalization="none")


def test_bytecode_loud_pair():
    (d,) = detect_pair(0.05, 0.95)
    assert d.direction == BYTECODE_LOUD and d.gap == pytest.approx(0.9)


def test_equal_pair_not_flagged():
    assert detect_pair(0.5, 0.5) == []


def test_source_loud_pair():
    (d,) = detect_pair(0.95, 0.05)
    assert d.direction == SOURCE_LOUD


def test_class_score_is_max_over_functions():
    found = compiler_induced_detect({"f1": 0.1, "f2": 0.05}, {"c": 1.0}, {"c": ["f1", "f2"]}, 0.8, "none")
    assert found[0].tree_score == 0.1


def test_max_normalization():
    assert normalize({"a": 2.0, "b": 4.0}) == {"a": 0.5, "b": 1.0}
    assert normalize({"a": 0.0}) == {"a": 0.0}


def test_no_links():
    assert compiler_induced_detect({"f": 1.0}, {"c": 1.0}, {}, 0.8) == []
    with pytest.raises(NoLinkedUnits):
        compiler_induced_detect({"f": 1.0}, {"c": 1.0}, {}, 0.8, strict=True)


@given(st.dictionaries(st.sampled_from([f"f{i}" for i in range(8)]), st.floats(0, 1), min_size=1),
       st.dictionaries(st.sampled_from([f"c{i}" for i in range(4)]), st.floats(0, 1), min_size=1),
       st.floats(0, 1))
def test_swapping_sides_flips_directions(fn_scores, cls_scores, delta):
    # one function per class keeps the two sides interchangeable
    links = {c: [f] for c, f in zip(sorted(cls_scores), sorted(fn_scores))}
    fn_of = {c: fs[0] for c, fs in links.items()}
    fwd = compiler_induced_detect(fn_scores, cls_scores, links, delta, "none")
    swapped_tree = {f: cls_scores[c] for c, f in fn_of.items()}
    swapped_byte = {c: fn_scores[f] for c, f in fn_of.items()}
    back = compiler_induced_detect(swapped_tree, swapped_byte, links, delta, "none")
    flip = {BYTECODE_LOUD: SOURCE_LOUD, SOURCE_LOUD: BYTECODE_LOUD}
    assert {(d.unit_id, flip[d.direction]) for d in fwd} == {(d.unit_id, d.direction) for d in back}
