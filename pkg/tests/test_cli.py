from __future__ import annotations

import json

import pytest

from codeanomaly.cli import main
from codeanomaly.detect import AnomalyScoreSet
from codeanomaly.features import load_vectors
from codeanomaly.synthetic import generate_corpus, synthetic_listing


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    gen = generate_corpus(300, seed=2)
    gen.write(root / "src")
    owners = sorted({f"gen.{rel.split('/')[1]}.{rel.split('/')[-1][:-3].capitalize()}Kt" for rel in gen.files})
    (root / "bc.txt").write_text(synthetic_listing(owners, 0, {}))
    assert main(["ingest", "--src", str(root / "src"), "--bytecode", str(root / "bc.txt"),
                 "--out", str(root / "corpus")]) == 0
    return root


def test_features_preprocess_detect(workdir):
    w = str(workdir)
    assert main(["features", "--corpus", f"{w}/corpus", "--mode", "metrics", "--out", f"{w}/m.jsonl"]) == 0
    assert load_vectors(f"{w}/m.jsonl").matrix.shape[1] == 51
    assert main(["preprocess", "--vectors", f"{w}/m.jsonl", "--pca-k", "20", "--out", f"{w}/p.jsonl"]) == 0
    assert load_vectors(f"{w}/p.jsonl").matrix.shape[1] == 20
    assert main(["detect", "--vectors", f"{w}/p.jsonl", "--algo", "lof", "--out", f"{w}/lof.json"]) == 0
    assert AnomalyScoreSet.load(f"{w}/lof.json").detector == "lof"
    assert main(["detect", "--vectors", f"{w}/p.jsonl", "--algo", "iforest", "--trees", "50",
                 "--out", f"{w}/if.json"]) == 0


def test_ngram_features_and_autoencoder(workdir):
    w = str(workdir)
    assert main(["features", "--corpus", f"{w}/corpus", "--mode", "tree-ngrams", "--min-df", "2",
                 "--out", f"{w}/t.jsonl"]) == 0
    vs = load_vectors(f"{w}/t.jsonl")
    assert len(vs.meta["vocabulary"]["entries"]) == vs.matrix.shape[1]
    assert main(["detect", "--vectors", f"{w}/t.jsonl", "--algo", "autoencoder", "--rate", "0.25",
                 "--epochs", "1", "--out", f"{w}/ae.json"]) == 0
    assert AnomalyScoreSet.load(f"{w}/ae.json").detector == "autoencoder-0.25"


def test_pipeline_run_and_report(workdir, capsys):
    w = str(workdir)
    assert main(["pipeline", "run", "--corpus", f"{w}/corpus", "--experiment", "explicit",
                 "--out", f"{w}/run"]) == 0
    assert main(["pipeline", "report", "--records", f"{w}/run/report.json", "--format", "markdown",
                 "--out", f"{w}/report.md"]) == 0
    assert (workdir / "report.md").read_text().startswith("#")
    capsys.readouterr()
    assert main(["pipeline", "report", "--records", f"{w}/run/report.json", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["schema_version"] == 1


def test_compiler_induced_command(workdir, tmp_path):
    tree = AnomalyScoreSet("autoencoder-0.5", ["fn-a"], [0.05], 0.0, [], {})
    byte = AnomalyScoreSet("autoencoder-0.5", ["cls-a"], [0.95], 0.0, [], {})
    tree.save(tmp_path / "t.json")
    byte.save(tmp_path / "b.json")
    (tmp_path / "links.json").write_text(json.dumps({"cls-a": ["fn-a"]}))
    assert main(["detect", "compiler-induced", "--tree-scores", str(tmp_path / "t.json"),
                 "--bytecode-scores", str(tmp_path / "b.json"), "--links", str(tmp_path / "links.json"),
                 "--normalization", "none", "--out", str(tmp_path / "ci.json")]) == 0
    report = json.loads((tmp_path / "ci.json").read_text())
    assert [r["direction"] for r in report["records"]] == ["bytecode-loud"]
    assert report["manifest"]["delta"] == 0.8


@pytest.mark.parametrize("argv", [
    [],
    ["detect", "--out", "x.json"],
    ["detect", "compiler-induced", "--out", "x.json"],
    ["ingest", "--out", "x"],
    ["features", "--corpus", "c", "--mode", "words", "--out", "x"],
])
def test_usage_errors_exit_two(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_bad_config_exits_two(workdir, tmp_path):
    (tmp_path / "cfg.json").write_text('{"lof": {"n_neighbors": "many"}}')
    assert main(["pipeline", "run", "--corpus", str(workdir / "corpus"), "--experiment", "explicit",
                 "--config", str(tmp_path / "cfg.json"), "--out", str(tmp_path / "run")]) == 2


def test_stage_failure_exits_one(tmp_path):
    assert main(["pipeline", "run", "--corpus", str(tmp_path / "nothing"), "--experiment", "explicit",
                 "--out", str(tmp_path / "run")]) == 1
