from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from ..parser import SyntaxNode
from ..parser.nodes import recursion_headroom


@dataclass(frozen=True)
class Origin:
    path: str
    start_line: int
    end_line: int

    def to_dict(self) -> dict:
        return {"path": self.path, "start_line": self.start_line, "end_line": self.end_line}


@dataclass
class CodeUnit:
    """A function extracted from source (or from the neutral tree format)."""

    unit_id: str
    origin: Origin
    display_name: str
    tree: SyntaxNode
    owner: Optional[str] = None
    excerpt: str = ""
    kind: str = "function"

    def to_record(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "kind": self.kind,
            "display_name": self.display_name,
            "owner": self.owner,
            "origin": self.origin.to_dict(),
            "excerpt": self.excerpt,
            "tree": self.tree.to_dict(),
        }

    @classmethod
    def from_record(cls, rec: dict) -> CodeUnit:
        o = rec["origin"]
        return cls(rec["unit_id"], Origin(o["path"], o["start_line"], o["end_line"]),
                   rec["display_name"], SyntaxNode.from_dict(rec["tree"]), rec.get("owner"),
                   rec.get("excerpt", ""))


@dataclass
class BytecodeUnit:
    """One compiled class: all method bodies concatenated in declaration order."""

    unit_id: str
    class_name: str
    instructions: list[str]
    source_link: list[str] = field(default_factory=list)
    methods: list[str] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "class_name": self.class_name,
            "methods": self.methods,
            "instructions": self.instructions,
            "source_link": self.source_link,
        }

    @classmethod
    def from_record(cls, rec: dict) -> BytecodeUnit:
        return cls(rec["unit_id"], rec["class_name"], list(rec["instructions"]),
                   list(rec.get("source_link", ())), list(rec.get("methods", ())))


def _digest(payload) -> str:
    with recursion_headroom():
        blob = json.dumps(payload, separators=(",", ":"), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:20]


def tree_unit_id(tree: SyntaxNode) -> str:
    """Content hash of a function tree; spans are ignored, identifier text is kept."""
    return "fn-" + _digest(tree.to_dict(spans=False))


def class_unit_id(class_name: str, instructions: list[str]) -> str:
    return "cls-" + _digest([class_name, instructions])


def dedup_units(units: list[CodeUnit]) -> list[CodeUnit]:
    """Keep the first unit for each distinct normalized tree."""
    seen: set[str] = set()
    out = []
    for u in units:
        if u.unit_id not in seen:
            seen.add(u.unit_id)
            out.append(u)
    return out
