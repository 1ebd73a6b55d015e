"""End-to-end experiments.

Each stage writes its output (vectors, scores, divergences) into the run
directory and the next stage reads it back from disk, so every score in a
record can be traced to a persisted file. Timings go to
``run_manifest.json`` only; the report's manifest excludes them so reports
are byte-identical across identical runs.
"""
from __future__ import annotations

import json
import logging
import tempfile
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from ..config import PipelineConfig
from ..corpus import Corpus
from ..detect import (AnomalyScoreSet, Autoencoder, NoLinkedUnits, compiler_induced_detect,
                      iforest_fit_score, lof_scores, rms_flag)
from ..features import CATALOG_VERSION, MetricsVectorizer, NGramVectorizer, load_vectors, save_vectors
from ..preprocess import CovariancePCA, MetricScaler
from .emit import emit_report
from .records import COMPILER_INDUCED, SYNTAX_TREE, AnomalyRecord, DetectorEntry, cap_excerpt, merge_records

log = logging.getLogger(__name__)

EXPERIMENTS = ("explicit", "implicit", "compiler-induced")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


class EmptyCorpus(ValueError):
    pass


class Run:
    """Run directory plus the bookkeeping that ends up in the manifests."""

    def __init__(self, corpus: Corpus, config: PipelineConfig, out_dir: Optional[str], experiment: str):
        self.corpus = corpus
        self.config = config
        self.experiment = experiment
        self._tmp = None
        if out_dir is None:
            self._tmp = tempfile.TemporaryDirectory(prefix="codeanomaly-")
            out_dir = self._tmp.name
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.timings: dict[str, float] = {}
        self.counts: dict[str, int] = {}
        self.files: dict[str, str] = {}
        self.extra: dict = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        finally:
            self.timings[name] = round(time.perf_counter() - t0, 6)

    def path(self, name: str) -> Path:
        self.files[name] = name
        return self.dir / name

    def manifest(self) -> dict:
        return {"experiment": self.experiment, "corpus_id": self.corpus.corpus_id,
                "config": self.config.to_dict(), "seed": self.config.seed,
                "catalog_version": CATALOG_VERSION, "counts": dict(self.counts),
                "files": dict(sorted(self.files.items())), **self.extra, "audit": []}

    def finish(self, records: list[AnomalyRecord]) -> list[AnomalyRecord]:
        self.counts["anomalies"] = len(records)
        manifest = self.manifest()
        emit_report(records, manifest, "json", str(self.dir / "report.json"))
        run_manifest = dict(manifest, timings=self.timings)
        (self.dir / "run_manifest.json").write_text(json.dumps(run_manifest, indent=1, sort_keys=True) + "\n",
                                                    encoding="utf-8")
        return records

    def close(self):
        if self._tmp is not None:
            self._tmp.cleanup()


def _functions(corpus: Corpus):
    fns = sorted(corpus.functions, key=lambda u: u.unit_id)
    if not fns:
        raise EmptyCorpus("corpus has no function units")
    return fns


def _syntax_records(corpus: Corpus, score_sets: list[AnomalyScoreSet]) -> list[AnomalyRecord]:
    index = {u.unit_id: u for u in corpus.functions}
    out = []
    for s in score_sets:
        by_id = s.as_dict()
        for uid in s.flagged:
            u = index[uid]
            out.append(AnomalyRecord(uid, SYNTAX_TREE, [DetectorEntry(s.detector, by_id[uid], s.threshold)],
                                     u.origin.to_dict(), cap_excerpt(u.excerpt)))
    return merge_records(out)


def run_explicit(corpus: Corpus, config: Optional[PipelineConfig] = None,
                 out_dir: Optional[str] = None) -> list[AnomalyRecord]:
    """Metrics -> scaling -> PCA -> LOF and Isolation Forest; union of flagged units."""
    config = config or PipelineConfig()
    run = Run(corpus, config, out_dir, "explicit")
    try:
        with run.stage("units"):
            fns = _functions(corpus)
            ids = [u.unit_id for u in fns]
            run.counts["units"] = len(fns)
        with run.stage("metrics"):
            X = MetricsVectorizer().fit_transform(fns)
            save_vectors(run.path("metrics.jsonl"), ids, X,
                         {"mode": "metrics", "catalog_version": CATALOG_VERSION})
        with run.stage("preprocess"):
            vs = load_vectors(run.dir / "metrics.jsonl")
            scaler = MetricScaler(scale_binary=config.preprocess.scale_binary)
            pca = CovariancePCA(config.preprocess.pca_k)
            Z = pca.fit_transform(scaler.fit_transform(vs.matrix))
            save_vectors(run.path("pca.jsonl"), vs.unit_ids, Z,
                         {"mode": "pca", "scaler": scaler.to_dict(), "pca": pca.to_dict(),
                          "cumulative_explained_variance": pca.cumulative_explained_variance_})
            run.counts["vectors"] = len(vs)
            run.extra["cumulative_explained_variance"] = round(pca.cumulative_explained_variance_, 12)
        with run.stage("lof"):
            vs = load_vectors(run.dir / "pca.jsonl")
            lof = lof_scores(vs.matrix, config.lof.n_neighbors, config.lof.contamination, vs.unit_ids)
            lof.save(run.path("scores-lof.json"))
        with run.stage("iforest"):
            forest = iforest_fit_score(vs.matrix, config.iforest.n_estimators, config.iforest.max_samples,
                                       config.iforest.contamination, config.seed, vs.unit_ids)
            forest.save(run.path("scores-iforest.json"))
        with run.stage("records"):
            sets = [AnomalyScoreSet.load(run.dir / "scores-lof.json"),
                    AnomalyScoreSet.load(run.dir / "scores-iforest.json")]
            records = _syntax_records(corpus, sets)
        return run.finish(records)
    finally:
        run.close()


def _autoencoder_scores(run: Run, vectors_file: str, rate: float, tag: str) -> AnomalyScoreSet:
    cfg = run.config.autoencoder
    vs = load_vectors(run.dir / vectors_file)
    model = Autoencoder(rate, cfg.epochs, cfg.batch_size, cfg.learning_rate, cfg.optimizer,
                        run.config.seed).fit(vs.matrix)
    scores = model.score(vs.matrix)
    info = model.describe()
    name = f"autoencoder-{rate:g}"
    s = rms_flag(scores, name, cfg.rms_multiplier, vs.unit_ids,
                 {"rate": rate, "hidden_width": info["hidden_width"],
                  "loss_history": [float(x) for x in info["loss_history"]]})
    s.save(run.path(f"scores-{tag}-{name}.json"))
    return s


def run_implicit(corpus: Corpus, config: Optional[PipelineConfig] = None,
                 out_dir: Optional[str] = None) -> list[AnomalyRecord]:
    """Tree N-grams -> vocabulary -> one autoencoder per compression rate -> RMS rule; union."""
    config = config or PipelineConfig()
    run = Run(corpus, config, out_dir, "implicit")
    try:
        with run.stage("units"):
            fns = _functions(corpus)
            run.counts["units"] = len(fns)
        with run.stage("tree-ngrams"):
            f = config.features
            vec = NGramVectorizer("tree", f.nmax, f.window, f.min_df, f.max_df)
            M = vec.fit_transform(fns)
            save_vectors(run.path("tree-ngrams.jsonl"), [u.unit_id for u in fns], M,
                         {"mode": "tree-ngrams", "vocabulary": vec.vocabulary_.to_dict()})
            run.counts["vectors"] = M.shape[0]
            run.counts["vocabulary"] = M.shape[1]
        sets = []
        for rate in config.autoencoder.rates:
            with run.stage(f"autoencoder-{rate:g}"):
                sets.append(_autoencoder_scores(run, "tree-ngrams.jsonl", rate, "tree"))
        with run.stage("records"):
            records = _syntax_records(corpus, sets)
        return run.finish(records)
    finally:
        run.close()


def run_compiler_induced(corpus: Corpus, config: Optional[PipelineConfig] = None,
                         out_dir: Optional[str] = None) -> list[AnomalyRecord]:
    """Autoencoder scores on both representations, normalized, compared per linked class."""
    config = config or PipelineConfig()
    run = Run(corpus, config, out_dir, "compiler-induced")
    try:
        with run.stage("units"):
            fns = _functions(corpus)
            classes = sorted(corpus.classes, key=lambda c: c.unit_id)
            links = {c: ids for c, ids in corpus.links.items() if ids}
            if not classes or not links:
                raise NoLinkedUnits("corpus has no bytecode classes linked to functions")
            run.counts.update(units=len(fns), classes=len(classes), links=len(links))
        f = config.features
        with run.stage("tree-ngrams"):
            vec = NGramVectorizer("tree", f.nmax, f.window, f.min_df, f.max_df)
            M = vec.fit_transform(fns)
            save_vectors(run.path("tree-ngrams.jsonl"), [u.unit_id for u in fns], M,
                         {"mode": "tree-ngrams", "vocabulary": vec.vocabulary_.to_dict()})
        with run.stage("bytecode-ngrams"):
            bvec = NGramVectorizer("bytecode", f.nmax, f.window, f.bytecode_min_df, f.bytecode_max_df)
            B = bvec.fit_transform(classes)
            save_vectors(run.path("bytecode-ngrams.jsonl"), [c.unit_id for c in classes], B,
                         {"mode": "bytecode-ngrams", "vocabulary": bvec.vocabulary_.to_dict()})
        run.counts["vectors"] = M.shape[0] + B.shape[0]
        index = {u.unit_id: u for u in fns}
        cls_index = {c.unit_id: c for c in classes}
        records = []
        ci = config.compiler_induced
        for rate in config.autoencoder.rates:
            with run.stage(f"autoencoder-{rate:g}"):
                ts = _autoencoder_scores(run, "tree-ngrams.jsonl", rate, "tree")
                bs = _autoencoder_scores(run, "bytecode-ngrams.jsonl", rate, "bytecode")
                found = compiler_induced_detect(ts.as_dict(), bs.as_dict(), links, ci.delta, ci.normalization)
                name = f"autoencoder-{rate:g}"
                path = run.path(f"divergences-{name}.json")
                path.write_text(json.dumps([{"unit_id": d.unit_id, "tree_score": d.tree_score,
                                             "bytecode_score": d.bytecode_score, "gap": d.gap,
                                             "direction": d.direction, "functions": list(d.functions)}
                                            for d in found], indent=1, sort_keys=True) + "\n",
                                encoding="utf-8")
                for d in found:
                    cls = cls_index[d.unit_id]
                    units = [index[u] for u in d.functions]
                    origin = {"class_name": cls.class_name, "path": units[0].origin.path,
                              "functions": list(d.functions)}
                    excerpt = cap_excerpt("\n\n".join(u.excerpt for u in units))
                    records.append(AnomalyRecord(d.unit_id, COMPILER_INDUCED,
                                                 [DetectorEntry(name, d.gap, ci.delta)], origin, excerpt,
                                                 d.direction))
        with run.stage("records"):
            records = merge_records(records)
        return run.finish(records)
    finally:
        run.close()


RUNNERS = {"explicit": run_explicit, "implicit": run_implicit, "compiler-induced": run_compiler_induced}


def run_experiment(name: str, corpus: Corpus, config: Optional[PipelineConfig] = None,
                   out_dir: Optional[str] = None) -> list[AnomalyRecord]:
    if name not in RUNNERS:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    return RUNNERS[name](corpus, config, out_dir)
