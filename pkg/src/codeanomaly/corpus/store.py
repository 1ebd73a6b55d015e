"""On-disk corpus directory.

Layout::

    manifest.json     schema_version, corpus_id, counts, config, skipped, issues
    functions.jsonl   one CodeUnit record per line
    bytecode.jsonl    one BytecodeUnit record per line
    links.json        {class unit_id: [function unit_id, ...]}
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..parser.nodes import recursion_headroom
from .bytecode import ingest_bytecode
from .ingest import IngestLog, collect_sources, ingest_source, ingest_trees, link_units
from .units import BytecodeUnit, CodeUnit, dedup_units

SCHEMA_VERSION = 1


@dataclass
class Corpus:
    functions: list[CodeUnit] = field(default_factory=list)
    classes: list[BytecodeUnit] = field(default_factory=list)
    links: dict[str, list[str]] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    skipped: list[dict] = field(default_factory=list)
    issues: list[dict] = field(default_factory=list)

    @property
    def corpus_id(self) -> str:
        h = hashlib.sha256()
        for u in sorted(self.functions, key=lambda u: u.unit_id):
            h.update(u.unit_id.encode())
        h.update(b"|")
        for c in sorted(self.classes, key=lambda c: c.unit_id):
            h.update(c.unit_id.encode())
        return "corpus-" + h.hexdigest()[:16]

    def function(self, unit_id: str) -> CodeUnit:
        return self._index()[unit_id]

    def _index(self) -> dict:
        return {u.unit_id: u for u in self.functions}

    def manifest(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "corpus_id": self.corpus_id,
            "counts": {"function": len(self.functions), "class": len(self.classes),
                       "links": len(self.links)},
            "config": self.config,
            "skipped": self.skipped,
            "issues": self.issues,
        }

    def save(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_jsonl(out / "functions.jsonl", (u.to_record() for u in self.functions))
        _write_jsonl(out / "bytecode.jsonl", (c.to_record() for c in self.classes))
        (out / "links.json").write_text(json.dumps(self.links, indent=1, sort_keys=True) + "\n",
                                        encoding="utf-8")
        (out / "manifest.json").write_text(json.dumps(self.manifest(), indent=1, sort_keys=True) + "\n",
                                           encoding="utf-8")
        return out

    @classmethod
    def load(cls, corpus_dir) -> Corpus:
        d = Path(corpus_dir)
        manifest = json.loads((d / "manifest.json").read_text(encoding="utf-8"))
        if manifest.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported corpus schema {manifest.get('schema_version')!r}")
        functions = [CodeUnit.from_record(r) for r in _read_jsonl(d / "functions.jsonl")]
        classes = [BytecodeUnit.from_record(r) for r in _read_jsonl(d / "bytecode.jsonl")]
        links = json.loads((d / "links.json").read_text(encoding="utf-8"))
        counts = manifest["counts"]
        if counts["function"] != len(functions) or counts["class"] != len(classes):
            raise ValueError("manifest counts disagree with persisted units")
        return cls(functions, classes, links, manifest.get("config", {}),
                   manifest.get("skipped", []), manifest.get("issues", []))


def _write_jsonl(path: Path, records) -> None:
    with path.open("w", encoding="utf-8") as fh, recursion_headroom():
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":"), sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def _read_jsonl(path: Path):
    if not path.exists():
        return
    with path.open(encoding="utf-8") as fh, recursion_headroom():
        for line in fh:
            if line.strip():
                yield json.loads(line)


def build_corpus(src: Optional[str] = None, trees: Optional[str] = None,
                 bytecode: Optional[str] = None, jobs: int = 1) -> Corpus:
    """Ingest every available input, deduplicate, link and sort by unit id.

    Source files are visited in sorted path order, so "first occurrence" of a
    duplicated function is the one in the lexicographically first file.
    """
    ilog = IngestLog()
    functions: list[CodeUnit] = []
    if src is not None:
        functions += ingest_source(collect_sources(src), ilog, jobs=jobs)
    if trees is not None:
        functions += ingest_trees(trees)
    functions = dedup_units(functions)
    functions.sort(key=lambda u: u.unit_id)
    classes: list[BytecodeUnit] = []
    if bytecode is not None:
        classes = ingest_bytecode(bytecode, ilog.issues)
    classes.sort(key=lambda c: c.unit_id)
    links = link_units(functions, classes)
    config = {"src": str(src) if src else None, "trees": str(trees) if trees else None,
              "bytecode": str(bytecode) if bytecode else None}
    return Corpus(functions, classes, links, config, ilog.skipped, ilog.issues)
