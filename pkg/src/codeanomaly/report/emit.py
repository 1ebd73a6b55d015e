"""JSON and markdown reports.

The JSON document is ``{schema_version, manifest, records}``; keys are
sorted and no timestamps are included, so identical inputs give identical
bytes. The markdown form is meant for reviewers but keeps every field in a
regular layout, and :func:`parse_markdown` reads it back.
"""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable, Optional

from .records import AnomalyRecord, DetectorEntry, sort_records

REPORT_SCHEMA = 1


def report_dict(records: Iterable[AnomalyRecord], manifest: dict) -> dict:
    return {"schema_version": REPORT_SCHEMA, "manifest": manifest,
            "records": [r.to_dict() for r in sort_records(records)]}


def to_json(records: Iterable[AnomalyRecord], manifest: dict) -> str:
    return json.dumps(report_dict(records, manifest), indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def _fence(text: str) -> str:
    longest = max((len(m) for m in re.findall(r"`+", text)), default=0)
    return "`" * max(3, longest + 1)


def to_markdown(records: Iterable[AnomalyRecord], manifest: dict) -> str:
    records = sort_records(records)
    out = ["# Anomaly report", "", f"schema_version: {REPORT_SCHEMA}", f"records: {len(records)}", "",
           "## Manifest", "", "```json", json.dumps(manifest, indent=1, sort_keys=True), "```", ""]
    for i, r in enumerate(records, 1):
        out += [f"## {i}. {r.unit_id}", "", f"- kind: {r.kind}"]
        if r.direction is not None:
            out.append(f"- direction: {r.direction}")
        out += [f"- tags: {json.dumps(r.tags, ensure_ascii=False)}",
                f"- origin: {json.dumps(r.origin, sort_keys=True, ensure_ascii=False)}",
                f"- excluded: {str(r.excluded).lower()}", "",
                "| detector | score | threshold |", "|---|---|---|"]
        for d in r.detectors:
            out.append(f"| {d.name} | {d.score!r} | {d.threshold!r} |")
        fence = _fence(r.excerpt)
        out += ["", fence + "kotlin", r.excerpt, fence, ""]
    return "\n".join(out)


def emit_report(records: Iterable[AnomalyRecord], manifest: dict, fmt: str = "json",
                path: Optional[str] = None) -> str:
    if fmt == "json":
        text = to_json(records, manifest)
    elif fmt == "markdown":
        text = to_markdown(records, manifest)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_report(path) -> tuple[list[AnomalyRecord], dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("schema_version") != REPORT_SCHEMA:
        raise ValueError(f"unsupported report schema {doc.get('schema_version')!r}")
    return [AnomalyRecord.from_dict(r) for r in doc["records"]], doc["manifest"]


_HEADING = re.compile(r"^## \d+\. (\S+)$")
_FLOAT = {"inf": float("inf"), "-inf": float("-inf"), "nan": float("nan")}


def _num(text: str) -> float:
    text = text.strip()
    return _FLOAT[text] if text in _FLOAT else float(text)


def parse_markdown(text: str) -> tuple[list[AnomalyRecord], dict]:
    lines = text.split("\n")
    manifest: dict = {}
    records = []
    i = 0
    while i < len(lines):
        line = lines[i]
        if line == "## Manifest":
            start = lines.index("```json", i) + 1
            end = lines.index("```", start)
            manifest = json.loads("\n".join(lines[start:end]))
            i = end + 1
            continue
        m = _HEADING.match(line)
        if not m:
            i += 1
            continue
        fields: dict = {}
        detectors = []
        i += 1
        while not lines[i].startswith("`"):
            row = lines[i]
            if row.startswith("- "):
                key, _, value = row[2:].partition(": ")
                fields[key] = value
            elif row.startswith("| ") and not row.startswith("| detector"):
                name, score, threshold = [c.strip() for c in row.strip("|").split("|")]
                detectors.append(DetectorEntry(name, _num(score), _num(threshold)))
            i += 1
        fence = lines[i][: len(lines[i]) - len("kotlin")]
        end = lines.index(fence, i + 1)
        excerpt = "\n".join(lines[i + 1:end])
        records.append(AnomalyRecord(m.group(1), fields["kind"], detectors, json.loads(fields["origin"]),
                                     excerpt, fields.get("direction"), json.loads(fields["tags"]),
                                     fields["excluded"] == "true"))
        i = end + 1
    return records, manifest
