"""Command line entry point: ``codeanomaly <command> ...``.

Exit status is 0 on success, 1 when a stage fails and 2 for configuration
or usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import scipy.sparse as sp

from .config import ConfigError, PipelineConfig
from .corpus import Corpus, build_corpus
from .detect import (AnomalyScoreSet, Autoencoder, compiler_induced_detect, iforest_fit_score, lof_scores,
                     rms_flag)
from .features import CATALOG_VERSION, MetricsVectorizer, NGramVectorizer, load_vectors, save_vectors
from .preprocess import CovariancePCA, MetricScaler
from .report import (COMPILER_INDUCED, AnomalyRecord, DetectorEntry, cap_excerpt, emit_report, load_report,
                     merge_records, run_experiment)

log = logging.getLogger("codeanomaly")

OK, STAGE_FAILURE, CONFIG_ERROR = 0, 1, 2


def _ingest(args) -> None:
    if not (args.src or args.trees or args.bytecode):
        raise ConfigError("ingest needs at least one of --src, --trees, --bytecode")
    corpus = build_corpus(args.src, args.trees, args.bytecode, jobs=args.jobs)
    corpus.save(args.out)
    print(f"{len(corpus.functions)} functions, {len(corpus.classes)} classes, "
          f"{len(corpus.skipped)} skipped -> {args.out}")


def _features(args) -> None:
    corpus = Corpus.load(args.corpus)
    if args.mode == "metrics":
        units = corpus.functions
        matrix = MetricsVectorizer().fit_transform(units)
        meta = {"mode": "metrics", "catalog_version": CATALOG_VERSION}
    else:
        domain = "tree" if args.mode == "tree-ngrams" else "bytecode"
        units = corpus.functions if domain == "tree" else corpus.classes
        vec = NGramVectorizer(domain, args.nmax, args.window, args.min_df, args.max_df)
        matrix = vec.fit_transform(units)
        meta = {"mode": args.mode, "vocabulary": vec.vocabulary_.to_dict()}
    save_vectors(args.out, [u.unit_id for u in units], matrix, meta)
    print(f"{matrix.shape[0]} x {matrix.shape[1]} -> {args.out}")


def _preprocess(args) -> None:
    vs = load_vectors(args.vectors)
    X = vs.matrix.toarray() if sp.issparse(vs.matrix) else vs.matrix
    scaler = MetricScaler(scale_binary=not args.no_scale_binary)
    pca = CovariancePCA(args.pca_k)
    Z = pca.fit_transform(scaler.fit_transform(X))
    save_vectors(args.out, vs.unit_ids, Z,
                 {"mode": "pca", "source": vs.meta.get("mode"), "scaler": scaler.to_dict(), "pca": pca.to_dict(),
                  "cumulative_explained_variance": pca.cumulative_explained_variance_})
    print(f"{X.shape[1]} -> {Z.shape[1]} dims, {pca.cumulative_explained_variance_:.4f} variance kept")


def _detect(args) -> None:
    vs = load_vectors(args.vectors)
    X = vs.matrix
    dense = X.toarray() if sp.issparse(X) else X
    if args.algo == "lof":
        result = lof_scores(dense, args.k, _contamination(args, 0.001), vs.unit_ids)
    elif args.algo == "iforest":
        result = iforest_fit_score(dense, args.trees, args.max_samples, _contamination(args, 0.0001),
                                   args.seed, vs.unit_ids)
    else:
        model = Autoencoder(args.rate, args.epochs, args.batch, args.lr, args.optimizer, args.seed).fit(X)
        info = model.describe()
        result = rms_flag(model.score(X), f"autoencoder-{args.rate:g}", args.rms, vs.unit_ids,
                          {"rate": args.rate, "hidden_width": info["hidden_width"],
                           "loss_history": [float(v) for v in info["loss_history"]]})
    result.save(args.out)
    print(f"{len(result.flagged)} of {len(result.unit_ids)} flagged by {result.detector} -> {args.out}")


def _contamination(args, default: float) -> float:
    return default if args.contamination is None else args.contamination


def _compiler_induced(args) -> None:
    tree = AnomalyScoreSet.load(args.tree_scores)
    byte = AnomalyScoreSet.load(args.bytecode_scores)
    links = json.loads(Path(args.links).read_text(encoding="utf-8"))
    found = compiler_induced_detect(tree.as_dict(), byte.as_dict(), links, args.delta, args.normalization)
    corpus = Corpus.load(args.corpus) if args.corpus else None
    fns = {u.unit_id: u for u in corpus.functions} if corpus else {}
    classes = {c.unit_id: c for c in corpus.classes} if corpus else {}
    records = []
    for d in found:
        origin: dict = {"functions": list(d.functions)}
        excerpt = ""
        if d.unit_id in classes:
            origin["class_name"] = classes[d.unit_id].class_name
        units = [fns[f] for f in d.functions if f in fns]
        if units:
            origin["path"] = units[0].origin.path
            excerpt = cap_excerpt("\n\n".join(u.excerpt for u in units))
        records.append(AnomalyRecord(d.unit_id, COMPILER_INDUCED,
                                     [DetectorEntry(byte.detector, d.gap, args.delta)], origin, excerpt,
                                     d.direction))
    manifest = {"experiment": "compiler-induced", "delta": args.delta, "normalization": args.normalization,
                "tree_scores": str(args.tree_scores), "bytecode_scores": str(args.bytecode_scores),
                "counts": {"anomalies": len(records)}}
    emit_report(merge_records(records), manifest, "json", args.out)
    print(f"{len(records)} compiler-induced records -> {args.out}")


def _pipeline_run(args) -> None:
    config = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    corpus = Corpus.load(args.corpus)
    records = run_experiment(args.experiment, corpus, config, args.out)
    print(f"{len(records)} records -> {Path(args.out) / 'report.json'}")


def _pipeline_report(args) -> None:
    records, manifest = load_report(args.records)
    text = emit_report(records, manifest, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="codeanomaly", description="Code anomaly detection over Kotlin corpora.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="build a corpus directory")
    s.add_argument("--src", help="directory of .kt files")
    s.add_argument("--trees", help="JSONL file of serialized function trees")
    s.add_argument("--bytecode", help="bytecode listing file")
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=_ingest)

    s = sub.add_parser("features", help="vectorize a corpus")
    s.add_argument("--corpus", required=True)
    s.add_argument("--mode", choices=("metrics", "tree-ngrams", "bytecode-ngrams"), required=True)
    s.add_argument("--nmax", type=int, default=3)
    s.add_argument("--window", type=int, default=3)
    s.add_argument("--min-df", type=int, default=5)
    s.add_argument("--max-df", type=float, default=0.5)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_features)

    s = sub.add_parser("preprocess", help="standardize and project metric vectors")
    s.add_argument("--vectors", required=True)
    s.add_argument("--pca-k", type=int, default=20)
    s.add_argument("--no-scale-binary", action="store_true", help="leave the binary metrics unscaled")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_preprocess)

    s = sub.add_parser("detect", help="score vectors, or compare two score files")
    s.add_argument("mode", nargs="?", choices=("compiler-induced",))
    s.add_argument("--vectors")
    s.add_argument("--algo", choices=("lof", "iforest", "autoencoder"))
    s.add_argument("--contamination", type=float)
    s.add_argument("--k", type=int, default=20)
    s.add_argument("--trees", type=int, default=200)
    s.add_argument("--max-samples", type=int, default=256)
    s.add_argument("--epochs", type=int, default=5)
    s.add_argument("--batch", type=int, default=1024)
    s.add_argument("--rate", type=float, default=0.5)
    s.add_argument("--lr", type=float, default=0.01)
    s.add_argument("--optimizer", choices=("sgd", "adam"), default="sgd")
    s.add_argument("--rms", type=float, default=3.0, help="RMS multiplier for the autoencoder threshold")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tree-scores")
    s.add_argument("--bytecode-scores")
    s.add_argument("--links")
    s.add_argument("--corpus", help="corpus directory used to fill origins and excerpts")
    s.add_argument("--delta", type=float, default=0.8)
    s.add_argument("--normalization", choices=("max", "none"), default="max")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_detect_dispatch)

    s = sub.add_parser("pipeline", help="run an experiment or render a report")
    psub = s.add_subparsers(dest="action", required=True)
    r = psub.add_parser("run")
    r.add_argument("--corpus", required=True)
    r.add_argument("--experiment", choices=("explicit", "implicit", "compiler-induced"), required=True)
    r.add_argument("--config")
    r.add_argument("--out", required=True)
    r.set_defaults(func=_pipeline_run)
    r = psub.add_parser("report")
    r.add_argument("--records", required=True, help="report.json produced by a run")
    r.add_argument("--format", choices=("markdown", "json"), default="markdown")
    r.add_argument("--out")
    r.set_defaults(func=_pipeline_report)
    return p


def _detect_dispatch(args) -> None:
    if args.mode == "compiler-induced":
        missing = [n for n in ("tree_scores", "bytecode_scores", "links") if getattr(args, n) is None]
        if missing:
            raise ConfigError("compiler-induced needs " + ", ".join("--" + m.replace("_", "-") for m in missing))
        _compiler_induced(args)
        return
    if args.vectors is None or args.algo is None:
        raise ConfigError("detect needs --vectors and --algo")
    if args.contamination is not None and not 0 < args.contamination <= 0.5:
        raise ConfigError("--contamination must be in (0, 0.5]")
    if args.algo == "autoencoder" and not 0 < args.rate <= 1:
        raise ConfigError("--rate must be in (0, 1]")
    _detect(args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else CONFIG_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        log.debug("failure", exc_info=True)
        return STAGE_FAILURE
    return OK


if __name__ == "__main__":
    sys.exit(main())
