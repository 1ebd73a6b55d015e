"""Syntax tree nodes and the closed node-kind catalog.

The same catalog is used by the bundled parser and by the neutral tree
format, so trees from either source are interchangeable.
"""
from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional

NODE_KINDS = frozenset({
    # declarations
    "FILE", "PACKAGE_DIRECTIVE", "IMPORT_DIRECTIVE", "IMPORT_ALIAS",
    "FUNCTION", "CLASS", "INTERFACE", "OBJECT", "ENUM_ENTRY", "PROPERTY",
    "PRIMARY_CONSTRUCTOR", "CLASS_BODY", "INITIALIZER", "PROPERTY_ACCESSOR",
    "SUPERTYPE_LIST", "SUPERTYPE", "DELEGATE",
    "PARAMETER_LIST", "PARAMETER", "TYPE_PARAMETER_LIST", "TYPE_PARAMETER",
    "RECEIVER_TYPE", "TYPE_REFERENCE", "TYPE_ARGUMENT_LIST", "FUNCTION_TYPE",
    "MODIFIER_LIST", "MODIFIER", "ANNOTATION", "KEYWORD", "DESTRUCTURING",
    # statements and control flow
    "BLOCK", "IF_EXPR", "WHEN_EXPR", "WHEN_ENTRY", "WHEN_CONDITION", "WHEN_ELSE",
    "TRY_EXPR", "CATCH_CLAUSE", "FINALLY_CLAUSE", "FOR_LOOP", "WHILE_LOOP",
    "DO_WHILE_LOOP", "RETURN", "THROW", "BREAK", "CONTINUE", "LABEL", "ASSIGNMENT",
    # expressions
    "BINARY_EXPR", "PREFIX_EXPR", "POSTFIX_EXPR", "IS_EXPR", "AS_EXPR",
    "CALL_EXPR", "VALUE_ARGUMENT_LIST", "VALUE_ARGUMENT", "DOT_QUALIFIED",
    "SAFE_QUALIFIED", "INDEX_EXPR", "CALLABLE_REFERENCE", "CLASS_LITERAL",
    "LAMBDA", "LAMBDA_PARAMETERS", "PARENTHESIZED", "THIS", "SUPER",
    "STRING_TEMPLATE", "OPEN_QUOTE", "STRING_ENTRY", "SHORT_TEMPLATE_EXPR",
    "LONG_TEMPLATE_EXPR", "OPERATION", "IDENTIFIER", "LITERAL", "STAR_PROJECTION",
})


@dataclass(eq=False)
class SyntaxNode:
    kind: str
    children: list[SyntaxNode] = field(default_factory=list)
    text: Optional[str] = None
    span: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if self.text is not None and self.children:
            raise ValueError(f"{self.kind} node carries text but has children")

    def __repr__(self):
        if self.text is not None:
            return f"{self.kind}({self.text!r})"
        return f"{self.kind}({', '.join(map(repr, self.children))})"

    def walk(self) -> Iterator[SyntaxNode]:
        """Pre-order traversal, iterative so deep trees do not hit the recursion limit."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def find(self, kind: str) -> list[SyntaxNode]:
        return [n for n in self.walk() if n.kind == kind]

    def child(self, kind: str) -> Optional[SyntaxNode]:
        for c in self.children:
            if c.kind == kind:
                return c
        return None

    @property
    def name(self) -> Optional[str]:
        ident = self.child("IDENTIFIER")
        return ident.text if ident is not None else None

    def structure(self):
        """Span-free nested tuple; equal for structurally identical trees."""
        return _fold(self, lambda n, kids: (n.kind, n.text, tuple(kids)))

    def to_dict(self, spans: bool = True) -> dict:
        def build(n: SyntaxNode, kids: list) -> dict:
            out: dict = {"kind": n.kind, "children": kids}
            if n.text is not None:
                out["text"] = n.text
            if spans and n.span is not None:
                out["span"] = list(n.span)
            return out
        return _fold(self, build)

    @classmethod
    def from_dict(cls, data: dict) -> SyntaxNode:
        # explicit stack of (record, built children); deep trees must not recurse
        def make(rec: dict, kids: list) -> SyntaxNode:
            kind = rec.get("kind")
            if kind not in NODE_KINDS:
                raise UnknownNodeKind(kind)
            span = rec.get("span")
            return cls(kind, kids, rec.get("text"), tuple(span) if span is not None else None)

        if not isinstance(data, dict):
            raise ValueError("tree record must be an object")
        stack = [(data, iter(data.get("children", ())), [])]
        while True:
            rec, it, kids = stack[-1]
            nxt = next(it, None)
            if nxt is not None:
                if not isinstance(nxt, dict):
                    raise ValueError("tree children must be objects")
                stack.append((nxt, iter(nxt.get("children", ())), []))
                continue
            node = make(rec, kids)
            stack.pop()
            if not stack:
                return node
            stack[-1][2].append(node)


def _fold(root: SyntaxNode, combine):
    """Post-order fold without recursion: ``combine(node, folded_children)``."""
    stack = [(root, iter(root.children), [])]
    while True:
        node, it, acc = stack[-1]
        nxt = next(it, None)
        if nxt is not None:
            stack.append((nxt, iter(nxt.children), []))
            continue
        value = combine(node, acc)
        stack.pop()
        if not stack:
            return value
        stack[-1][2].append(value)


DEEP_RECURSION = 8000


@contextmanager
def recursion_headroom(limit: int = DEEP_RECURSION):
    """Temporarily raise the interpreter recursion limit for deep trees (printing, JSON)."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


class UnknownNodeKind(ValueError):
    def __init__(self, kind):
        super().__init__(f"unknown node kind {kind!r}")
        self.kind = kind


def height(node: SyntaxNode) -> int:
    """Number of nodes on the longest root-to-leaf path."""
    best = 0
    stack = [(node, 1)]
    while stack:
        n, depth = stack.pop()
        best = max(best, depth)
        stack.extend((c, depth + 1) for c in n.children)
    return best
