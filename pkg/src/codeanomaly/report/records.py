from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .tags import canonical_tag

SYNTAX_TREE = "syntax-tree"
COMPILER_INDUCED = "compiler-induced"
KINDS = (SYNTAX_TREE, COMPILER_INDUCED)
EXCERPT_LINES = 60


def cap_excerpt(text: str, limit: int = EXCERPT_LINES) -> str:
    lines = text.splitlines()
    if len(lines) <= limit:
        return text
    return "\n".join(lines[:limit] + [f"... [truncated: {len(lines) - limit} more lines]"])


@dataclass(frozen=True)
class DetectorEntry:
    name: str
    score: float
    threshold: float

    def to_dict(self) -> dict:
        return {"name": self.name, "score": self.score, "threshold": self.threshold}


@dataclass
class AnomalyRecord:
    unit_id: str
    kind: str
    detectors: list[DetectorEntry]
    origin: dict = field(default_factory=dict)
    excerpt: str = ""
    direction: Optional[str] = None
    tags: list[str] = field(default_factory=list)
    excluded: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown anomaly kind {self.kind!r}")
        if not self.detectors:
            raise ValueError("an anomaly record needs at least one detector entry")
        self.tags = sorted(set(self.tags))

    @property
    def max_score(self) -> float:
        return max(d.score for d in self.detectors)

    def add_detector(self, entry: DetectorEntry) -> None:
        if all(d.name != entry.name for d in self.detectors):
            self.detectors.append(entry)
            self.detectors.sort(key=lambda d: d.name)

    def to_dict(self) -> dict:
        out = {"unit_id": self.unit_id, "kind": self.kind,
               "detectors": [d.to_dict() for d in self.detectors]}
        if self.direction is not None:
            out["direction"] = self.direction
        out.update({"tags": list(self.tags), "origin": dict(self.origin), "excerpt": self.excerpt,
                    "excluded": self.excluded})
        return out

    @classmethod
    def from_dict(cls, d: dict) -> AnomalyRecord:
        return cls(d["unit_id"], d["kind"],
                   [DetectorEntry(e["name"], float(e["score"]), float(e["threshold"])) for e in d["detectors"]],
                   dict(d.get("origin", {})), d.get("excerpt", ""), d.get("direction"),
                   list(d.get("tags", [])), bool(d.get("excluded", False)))


def sort_records(records: Iterable[AnomalyRecord]) -> list[AnomalyRecord]:
    return sorted(records, key=lambda r: (r.kind, -r.max_score, r.unit_id))


def merge_records(records: Iterable[AnomalyRecord]) -> list[AnomalyRecord]:
    """One record per (unit_id, kind); detector entries and tags are unioned."""
    merged: dict[tuple[str, str], AnomalyRecord] = {}
    for r in records:
        key = (r.unit_id, r.kind)
        if key not in merged:
            merged[key] = AnomalyRecord(r.unit_id, r.kind, sorted(r.detectors, key=lambda d: d.name),
                                        dict(r.origin), r.excerpt, r.direction, list(r.tags), r.excluded)
            continue
        m = merged[key]
        for d in r.detectors:
            m.add_detector(d)
        m.tags = sorted(set(m.tags) | set(r.tags))
        m.excluded = m.excluded or r.excluded
    return sort_records(merged.values())


def tag(record: AnomalyRecord, tags: Iterable[str], strict: bool = False,
        audit: Optional[list] = None, note: str = "") -> AnomalyRecord:
    """Merge tags into the record; duplicates are ignored. Tags are stored, never inferred."""
    added = [canonical_tag(t, strict) for t in tags]
    before = set(record.tags)
    record.tags = sorted(before | set(added))
    if audit is not None:
        audit.append({"unit_id": record.unit_id, "kind": record.kind, "action": "tag",
                      "added": sorted(set(added) - before), "note": note})
    return record


def exclude(record: AnomalyRecord, audit: Optional[list] = None, note: str = "") -> AnomalyRecord:
    """Mark a record as filtered out by a reviewer; it stays in the report."""
    record.excluded = True
    if audit is not None:
        audit.append({"unit_id": record.unit_id, "kind": record.kind, "action": "exclude", "note": note})
    return record
