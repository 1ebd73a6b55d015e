from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from ..parser import LexError, ParseError, SyntaxNode, UnknownNodeKind, parse, to_source, tokenize
from ..parser.nodes import recursion_headroom
from .bytecode import FormatError
from .units import BytecodeUnit, CodeUnit, Origin, tree_unit_id

log = logging.getLogger(__name__)

_CONTAINERS = {"CLASS", "INTERFACE", "OBJECT"}


@dataclass
class IngestLog:
    """Non-fatal problems met while ingesting; the run continues past them."""

    skipped: list[dict] = field(default_factory=list)
    issues: list[dict] = field(default_factory=list)

    def skip(self, path: str, reason: str) -> None:
        log.warning("skipping %s: %s", path, reason)
        self.skipped.append({"path": path, "reason": reason})


def file_facade_class(path: str, package: str) -> str:
    """JVM class holding top-level functions of a Kotlin file (``util.kt`` -> ``UtilKt``)."""
    stem = Path(path).stem
    name = (stem[:1].upper() + stem[1:]).replace("-", "_").replace(".", "_") + "Kt"
    return f"{package}.{name}" if package else name


def extract_functions(file_tree: SyntaxNode, path: str, source: Optional[str] = None) -> list[CodeUnit]:
    """One unit per FUNCTION node, nested and member functions included, in source order."""
    package = ""
    pkg = file_tree.child("PACKAGE_DIRECTIVE")
    if pkg is not None:
        package = ".".join(c.text for c in pkg.children)
    facade = file_facade_class(path, package)
    lines = source.splitlines() if source is not None else None
    units: list[CodeUnit] = []
    # (node, jvm owner) with explicit stack; children pushed reversed to keep source order
    stack = [(file_tree, None)]
    while stack:
        node, owner = stack.pop()
        child_owner = owner
        if node.kind in _CONTAINERS:
            simple = node.name or ("Companion" if node.kind == "OBJECT" else "Anonymous")
            if owner is None:
                child_owner = f"{package}.{simple}" if package else simple
            else:
                child_owner = f"{owner}${simple}"
        elif node.kind == "FUNCTION":
            fn_owner = owner or facade
            start, end = node.span or (0, 0)
            if lines is not None and node.span is not None:
                excerpt = "\n".join(lines[start - 1:end])
            else:
                excerpt = to_source(node)
            units.append(CodeUnit(tree_unit_id(node), Origin(path, start, end), node.name or "<anonymous>",
                                  node, fn_owner, excerpt))
            child_owner = fn_owner
        stack.extend((c, child_owner) for c in reversed(node.children))
    return units


def _ingest_one(path: str):
    try:
        source = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return None, f"io error: {exc}"
    try:
        tree = parse(tokenize(source))
    except (ParseError, LexError) as exc:
        return None, f"{type(exc).__name__}: {exc}"
    return extract_functions(tree, path, source), None


def ingest_source(paths: Iterable, ingest_log: Optional[IngestLog] = None, jobs: int = 1) -> list[CodeUnit]:
    """Parse source files into function units; unparseable or unreadable files are skipped."""
    paths = [str(p) for p in paths]
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_ingest_one, paths, chunksize=16))
    else:
        results = [_ingest_one(p) for p in paths]
    units: list[CodeUnit] = []
    for path, (found, error) in zip(paths, results):
        if error is not None:
            (ingest_log or IngestLog()).skip(path, error)
            continue
        units.extend(found)
    return units


def collect_sources(root, suffix: str = ".kt") -> list[Path]:
    return sorted(p for p in Path(root).rglob(f"*{suffix}") if p.is_file())


def serialize_trees(units: Iterable[CodeUnit]) -> str:
    """Neutral tree format: one JSON tree per line, metadata under ``meta``."""
    lines = []
    with recursion_headroom():
        lines += [_tree_line(u) for u in units]
    return "\n".join(lines) + ("\n" if lines else "")


def _tree_line(u: CodeUnit) -> str:
    rec = u.tree.to_dict()
    rec["meta"] = {"path": u.origin.path, "owner": u.owner, "name": u.display_name}
    return json.dumps(rec, separators=(",", ":"), ensure_ascii=False)


def ingest_trees(path) -> list[CodeUnit]:
    """Read function trees from the neutral format, bypassing the bundled parser."""
    path = Path(path)
    units = []
    with path.open(encoding="utf-8") as fh, recursion_headroom():
        for recno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                tree = SyntaxNode.from_dict(rec)
            except UnknownNodeKind as exc:
                raise FormatError(f"record {recno}: unknown node kind {exc.kind!r}", str(path), recno) from None
            except (ValueError, TypeError, AttributeError) as exc:
                raise FormatError(f"record {recno}: {exc}", str(path), recno) from None
            if tree.kind != "FUNCTION":
                raise FormatError(f"record {recno}: root must be FUNCTION, got {tree.kind}", str(path), recno)
            meta = rec.get("meta") or {}
            start, end = tree.span or (0, 0)
            units.append(CodeUnit(tree_unit_id(tree), Origin(meta.get("path", str(path)), start, end),
                                  meta.get("name") or tree.name or "<anonymous>", tree,
                                  meta.get("owner"), to_source(tree)))
    return units


def _norm_class(name: str) -> str:
    return name.replace("/", ".")


def link_units(functions: list[CodeUnit], classes: list[BytecodeUnit]) -> dict[str, list[str]]:
    """Attach function unit ids to the compiled class that owns them.

    Ownership follows Kotlin's naming: top-level functions live in the file
    facade ``<File>Kt``, members in their class, nested classes use ``$``.
    Returns ``{class unit_id: [function unit_id, ...]}``; classes without a
    match are left unlinked.
    """
    by_owner: dict[str, list[str]] = {}
    for f in functions:
        if f.owner:
            ids = by_owner.setdefault(_norm_class(f.owner), [])
            if f.unit_id not in ids:
                ids.append(f.unit_id)
    links = {}
    for c in classes:
        ids = by_owner.get(_norm_class(c.class_name), [])
        c.source_link = list(ids)
        if ids:
            links[c.unit_id] = list(ids)
    return links
