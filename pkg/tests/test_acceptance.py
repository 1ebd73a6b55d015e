"""Acceptance criteria, one test each, with the stated counts, tolerances and time budgets."""
from __future__ import annotations

import json
import random
import time

import numpy as np

from builders import pair_corpus
from codeanomaly.config import PipelineConfig
from codeanomaly.corpus import Corpus
from codeanomaly.detect import BYTECODE_LOUD, SOURCE_LOUD, Autoencoder, compiler_induced_detect, iforest_fit_score
from codeanomaly.detect import local_outlier_factor
from codeanomaly.features import BINARY_SLOTS, METRIC_NAMES, QUANTITATIVE, extract_bytecode_ngrams
from codeanomaly.features import extract_tree_ngrams
from codeanomaly.preprocess import CovariancePCA
from codeanomaly.report import run_compiler_induced, run_explicit, run_implicit
from codeanomaly.report.pipeline import Run
from codeanomaly.synthetic import PLANTED_NAMES, STRUCTURALLY_UNIQUE
from oracles import (contiguous_grams, lof_reference, numeric_gradients, pca_reference, random_tree,
                     relative_error, tree_chains)


def test_config_fidelity(criterion, fixtures, tmp_path):
    t0 = time.perf_counter()
    golden = json.loads((fixtures / "golden" / "default_config.json").read_text())
    manifest = Run(Corpus(), PipelineConfig(), str(tmp_path), "explicit").manifest()
    cfg = manifest["config"]
    checks = {
        "manifest config equals golden": cfg == golden,
        "51 metrics": len(METRIC_NAMES) == cfg["features"]["n_metrics"] == 51,
        "49 quantitative + 2 binary": QUANTITATIVE == 49 and len(BINARY_SLOTS) == 2,
        "PCA 51->20": cfg["preprocess"]["pca_k"] == 20,
        "LOF k=20, c=0.001": (cfg["lof"]["n_neighbors"], cfg["lof"]["contamination"]) == (20, 0.001),
        "iforest 200 trees, c=0.0001": (cfg["iforest"]["n_estimators"], cfg["iforest"]["contamination"])
        == (200, 0.0001),
        "nmax=3": cfg["features"]["nmax"] == 3,
        "autoencoder 5/1024/{0.25,0.5,0.75}": (cfg["autoencoder"]["epochs"], cfg["autoencoder"]["batch_size"],
                                               cfg["autoencoder"]["rates"]) == (5, 1024, [0.25, 0.5, 0.75]),
        "RMS x3": cfg["autoencoder"]["rms_multiplier"] == 3,
        "delta 0.8": cfg["compiler_induced"]["delta"] == 0.8,
    }
    elapsed = time.perf_counter() - t0
    bad = [k for k, ok in checks.items() if not ok]
    criterion(1, "configuration fidelity", not bad and elapsed < 1,
              f"mismatches={bad}, {elapsed:.3f}s")


def test_lof_oracle(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240101)
    worst = 0.0
    inf_mismatch = 0
    for i in range(100):
        k = (2, 5, 20)[i % 3]
        n = int(rng.integers(k + 1, 201))
        d = int(rng.integers(1, 11))
        X = rng.normal(size=(n, d))
        if i % 4 == 3:
            # coarse grid values give ties and duplicate points
            X = np.round(X * 2) / 2
        got = local_outlier_factor(X, k)
        want = np.array(lof_reference(X, k))
        same_inf = np.isinf(got) == np.isinf(want)
        inf_mismatch += int((~same_inf).sum())
        finite = ~np.isinf(want)
        if finite.any():
            worst = max(worst, float(np.max(np.abs(got[finite] - want[finite]))))
    elapsed = time.perf_counter() - t0
    criterion(2, "LOF oracle equivalence", worst < 1e-9 and inf_mismatch == 0 and elapsed < 30,
              f"max deviation {worst:.2e}, {elapsed:.1f}s")


def test_pca_oracle(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_component = worst_ratio = 0.0
    for _ in range(50):
        n = int(rng.integers(80, 400))
        X = rng.normal(size=(n, 51)) @ rng.normal(size=(51, 51)) + rng.normal(size=51) * 10
        pca = CovariancePCA(20).fit(X)
        ref, ratio, _ = pca_reference(X, 20)
        for got, want in zip(pca.components_, ref):
            worst_component = max(worst_component, min(np.abs(got - want).max(), np.abs(got + want).max()))
        worst_ratio = max(worst_ratio, float(np.abs(pca.explained_variance_ratio_ - ratio).max()))
    t = np.linspace(-4, 4, 100)[:, None]
    rank1 = t @ rng.normal(size=(1, 51)) + rng.normal(size=51)
    r1 = float(CovariancePCA(20).fit(rank1).explained_variance_ratio_[0])
    elapsed = time.perf_counter() - t0
    ok = worst_component < 1e-6 and worst_ratio < 1e-6 and abs(r1 - 1) <= 1e-9 and elapsed < 10
    criterion(3, "PCA oracle equivalence", ok,
              f"component {worst_component:.1e}, ratio {worst_ratio:.1e}, rank-1 {r1!r}, {elapsed:.1f}s")


def test_iforest_planted_outlier(criterion):
    t0 = time.perf_counter()
    hits = 0
    identical = True
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        base = rng.normal(size=(200, 2))
        radius = np.linalg.norm(base - base.mean(axis=0), axis=1).max()
        direction = rng.normal(size=2)
        outlier = base.mean(axis=0) + 50 * radius * direction / np.linalg.norm(direction)
        X = np.vstack([base, outlier])
        first = iforest_fit_score(X, seed=seed)
        hits += int(np.argmin(first.extra["normality"]) == 200)
        identical &= first.scores.tobytes() == iforest_fit_score(X, seed=seed).scores.tobytes()
    elapsed = time.perf_counter() - t0
    criterion(4, "Isolation Forest planted outlier", hits >= 18 and identical and elapsed < 30,
              f"{hits}/20 runs, bit-identical={identical}, {elapsed:.1f}s")


def test_autoencoder_gradients(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    X = rng.normal(size=(32, 10))
    worst = 0.0
    for rate in (0.25, 0.5, 0.75):
        model = Autoencoder(rate, epochs=1, batch_size=8, seed=2).fit(X)
        _, analytic = model.loss_and_grads(X)
        numeric = numeric_gradients(lambda: model.loss_and_grads(X)[0], model.params_)
        worst = max(worst, max(relative_error(a, n) for a, n in zip(analytic, numeric)))
    constant = np.tile(rng.uniform(0, 2, 10), (2000, 1))
    history = Autoencoder(0.5, epochs=5, batch_size=16, seed=0).fit(constant).loss_history_
    monotone = all(b <= a for a, b in zip(history, history[1:]))
    elapsed = time.perf_counter() - t0
    criterion(5, "autoencoder gradient check", worst < 1e-4 and monotone and elapsed < 30,
              f"max relative error {worst:.1e}, losses {[f'{v:.3g}' for v in history]}, {elapsed:.1f}s")


def test_ngram_exactness(criterion):
    t0 = time.perf_counter()
    r = random.Random(99)
    tree_bad = seq_bad = window_bad = 0
    for _ in range(1000):
        tree = random_tree(r, 200)
        tree_bad += extract_tree_ngrams(tree, 3) != tree_chains(tree, 3)
    ops = ["iload", "istore", "iadd", "isub", "goto", "ifeq", "invokestatic", "areturn"]
    for _ in range(1000):
        seq = [r.choice(ops) for _ in range(r.randint(1, 500))]
        nmax = r.randint(1, 4)
        got = extract_bytecode_ngrams(seq, nmax, nmax)
        seq_bad += got != contiguous_grams(seq, nmax)
        window_bad += got != extract_bytecode_ngrams(seq, nmax, nmax + r.randint(1, 6))
    elapsed = time.perf_counter() - t0
    criterion(6, "n-gram exactness", not (tree_bad or seq_bad or window_bad) and elapsed < 30,
              f"tree mismatches {tree_bad}, sequence {seq_bad}, window {window_bad}, {elapsed:.1f}s")


def planted_ids(corpus):
    return {u.display_name: u.unit_id for u in corpus.functions if u.display_name in PLANTED_NAMES}


def test_explicit_recall(criterion, planted_corpus, tmp_path):
    t0 = time.perf_counter()
    records = run_explicit(planted_corpus, out_dir=str(tmp_path))
    elapsed = time.perf_counter() - t0 + planted_corpus.build_seconds
    flagged = {r.unit_id for r in records}
    planted = planted_ids(planted_corpus)
    missed = sorted(name for name, uid in planted.items() if uid not in flagged)
    ok = len(planted) == 5 and not missed and len(flagged) <= 15 and elapsed < 300
    criterion(7, "explicit pipeline recall", ok,
              f"{len(planted_corpus.functions)} units, {len(flagged)} flagged, missed={missed}, {elapsed:.1f}s")


def test_implicit_recall(criterion, planted_corpus, tmp_path):
    t0 = time.perf_counter()
    records = run_implicit(planted_corpus, out_dir=str(tmp_path))
    elapsed = time.perf_counter() - t0 + planted_corpus.build_seconds
    target = planted_ids(planted_corpus)[STRUCTURALLY_UNIQUE]
    models = sorted(d.name for r in records if r.unit_id == target for d in r.detectors)
    criterion(8, "implicit pipeline recall", len(models) >= 1 and elapsed < 600,
              f"{STRUCTURALLY_UNIQUE} flagged by {models}, {len(records)} records, {elapsed:.1f}s")


def test_compiler_induced_rule(criterion):
    t0 = time.perf_counter()
    wrong = []
    base = 0.1
    for gap in (0.0, 0.79, 0.81, 0.9):
        for direction in (BYTECODE_LOUD, SOURCE_LOUD):
            tree, byte = (base, base + gap) if direction == BYTECODE_LOUD else (base + gap, base)
            found = compiler_induced_detect({"fn": tree}, {"cls": byte}, {"cls": ["fn"]}, 0.8, "none")
            expected = [direction] if gap > 0.8 else []
            if [d.direction for d in found] != expected:
                wrong.append((gap, direction))
    elapsed = time.perf_counter() - t0
    criterion(9, "compiler-induced rule", not wrong and elapsed < 1, f"wrong decisions {wrong}, {elapsed:.3f}s")


def test_determinism(criterion, planted_corpus, tmp_path):
    t0 = time.perf_counter()
    differing = []
    for name, runner in (("explicit", run_explicit), ("implicit", run_implicit)):
        runner(planted_corpus, out_dir=str(tmp_path / f"{name}-a"))
        runner(planted_corpus, out_dir=str(tmp_path / f"{name}-b"))
        if (tmp_path / f"{name}-a" / "report.json").read_bytes() != \
                (tmp_path / f"{name}-b" / "report.json").read_bytes():
            differing.append(name)
    pair = pair_corpus(tmp_path / "pair")
    run_compiler_induced(pair, out_dir=str(tmp_path / "ci-a"))
    run_compiler_induced(pair, out_dir=str(tmp_path / "ci-b"))
    if (tmp_path / "ci-a" / "report.json").read_bytes() != (tmp_path / "ci-b" / "report.json").read_bytes():
        differing.append("compiler-induced")
    elapsed = time.perf_counter() - t0
    criterion(10, "determinism", not differing and elapsed < 600,
              f"differing reports {differing}, {elapsed:.1f}s for three experiments run twice")
