"""Explicit representation: a fixed catalog of 51 function metrics.

Four groups: general size, structure/control flow, external signature, and
counts of particular language elements. The catalog is versioned so stored
vectors can be checked against the code that produced them.
"""
from __future__ import annotations

from collections import Counter
from typing import Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..corpus.units import CodeUnit
from ..parser import SyntaxNode, TokenKind, to_source, tokenize

CATALOG_VERSION = "kfm-1"

GENERAL = (
    "lines", "node_count", "tree_height", "token_count", "statement_count", "leaf_count",
    "identifier_count", "distinct_identifiers", "literal_count", "max_fanout", "block_count",
    "local_variable_count",
)
STRUCTURAL = (
    "max_nesting_depth", "cyclomatic_complexity", "when_count", "when_branches", "if_count",
    "loop_count", "max_loop_depth", "try_count", "max_try_depth", "catch_count",
    "return_count", "throw_count", "jump_count", "nested_function_count",
)
EXTERNAL = (
    "parameter_count", "type_parameter_count", "annotation_count", "default_parameter_count",
    "modifier_count", "function_type_parameters",
)
ELEMENTS = (
    "call_count", "max_call_chain", "max_nested_calls", "lambda_count", "string_literals",
    "string_templates", "empty_strings", "multiline_strings", "binary_operators",
    "logical_operators", "keyword_count", "assignment_count", "type_casts", "type_checks",
    "safe_calls", "elvis_count", "not_null_assertions",
)
BINARY = ("has_suspend", "is_extension")

METRIC_NAMES: tuple[str, ...] = GENERAL + STRUCTURAL + EXTERNAL + ELEMENTS + BINARY
QUANTITATIVE = len(METRIC_NAMES) - len(BINARY)
BINARY_SLOTS = tuple(range(QUANTITATIVE, len(METRIC_NAMES)))
assert QUANTITATIVE == 49 and len(BINARY) == 2 and len(set(METRIC_NAMES)) == 51

_CONTROL = {"IF_EXPR", "WHEN_EXPR", "FOR_LOOP", "WHILE_LOOP", "DO_WHILE_LOOP", "TRY_EXPR", "LAMBDA"}
_LOOPS = {"FOR_LOOP", "WHILE_LOOP", "DO_WHILE_LOOP"}
_QUALIFIED = {"DOT_QUALIFIED", "SAFE_QUALIFIED"}
_LOGICAL = {"&&", "||"}


def _lines(tree: SyntaxNode, printed: str) -> int:
    if tree.span is not None:
        return tree.span[1] - tree.span[0] + 1
    return printed.count("\n") + 1


def compute_metrics(unit: Union[CodeUnit, SyntaxNode]) -> np.ndarray:
    """Metric vector of one function, ordered as :data:`METRIC_NAMES`."""
    tree = unit.tree if isinstance(unit, CodeUnit) else unit
    if tree.kind != "FUNCTION":
        raise ValueError(f"metrics need a FUNCTION tree, got {tree.kind}")
    m: Counter = Counter()
    idents = set()
    printed = to_source(tree)
    tokens = [t for t in tokenize(printed) if t.kind is not TokenKind.COMMENT]
    m["lines"] = _lines(tree, printed)
    m["token_count"] = len(tokens)
    m["keyword_count"] = sum(1 for t in tokens if t.kind is TokenKind.KEYWORD)
    m["cyclomatic_complexity"] = 1

    # signature of the root function only
    mods = tree.child("MODIFIER_LIST")
    if mods is not None:
        m["annotation_count"] = sum(1 for c in mods.children if c.kind == "ANNOTATION")
        m["modifier_count"] = sum(1 for c in mods.children if c.kind == "MODIFIER")
        m["has_suspend"] = int(any(c.kind == "MODIFIER" and c.text == "suspend" for c in mods.children))
    tps = tree.child("TYPE_PARAMETER_LIST")
    m["type_parameter_count"] = len(tps.children) if tps is not None else 0
    m["is_extension"] = int(tree.child("RECEIVER_TYPE") is not None)
    params = tree.child("PARAMETER_LIST")
    for p in params.children if params is not None else ():
        m["parameter_count"] += 1
        ref = p.child("TYPE_REFERENCE")
        if ref is not None and p.children[-1] is not ref:
            m["default_parameter_count"] += 1
        if ref is not None and ref.child("FUNCTION_TYPE") is not None:
            m["function_type_parameters"] += 1

    # node, control depth, loop depth, try depth, call depth, chain length, tree depth
    stack = [(tree, 0, 0, 0, 0, 0, 1)]
    while stack:
        node, ctrl, loops, tries, calls, chain, depth = stack.pop()
        k = node.kind
        m["node_count"] += 1
        if depth > m["tree_height"]:
            m["tree_height"] = depth
        if not node.children:
            m["leaf_count"] += 1
        elif len(node.children) > m["max_fanout"]:
            m["max_fanout"] = len(node.children)
        if k in _CONTROL:
            ctrl += 1
            m["max_nesting_depth"] = max(m["max_nesting_depth"], ctrl)
        if k in _LOOPS:
            loops += 1
            m["loop_count"] += 1
            m["cyclomatic_complexity"] += 1
            m["max_loop_depth"] = max(m["max_loop_depth"], loops)
        if k == "TRY_EXPR":
            tries += 1
            m["try_count"] += 1
            m["max_try_depth"] = max(m["max_try_depth"], tries)
        if k == "CALL_EXPR":
            calls += 1
            m["call_count"] += 1
            m["max_nested_calls"] = max(m["max_nested_calls"], calls)

        if k == "IDENTIFIER":
            m["identifier_count"] += 1
            idents.add(node.text)
        elif k == "LITERAL":
            m["literal_count"] += 1
        elif k == "BLOCK":
            m["block_count"] += 1
            m["statement_count"] += len(node.children)
        elif k == "PROPERTY":
            m["local_variable_count"] += 1
        elif k == "WHEN_EXPR":
            m["when_count"] += 1
        elif k == "WHEN_ENTRY":
            m["when_branches"] += 1
            if node.children[0].kind != "WHEN_ELSE":
                m["cyclomatic_complexity"] += 1
        elif k == "IF_EXPR":
            m["if_count"] += 1
            m["cyclomatic_complexity"] += 1
        elif k == "CATCH_CLAUSE":
            m["catch_count"] += 1
            m["cyclomatic_complexity"] += 1
        elif k == "RETURN":
            m["return_count"] += 1
        elif k == "THROW":
            m["throw_count"] += 1
        elif k in ("BREAK", "CONTINUE"):
            m["jump_count"] += 1
        elif k == "FUNCTION" and node is not tree:
            m["nested_function_count"] += 1
        elif k == "LAMBDA":
            m["lambda_count"] += 1
        elif k == "STRING_TEMPLATE":
            m["string_literals"] += 1
            body = node.children[1:]
            if not body or all(c.kind == "STRING_ENTRY" and c.text == "" for c in body):
                m["empty_strings"] += 1
            if any(c.kind in ("SHORT_TEMPLATE_EXPR", "LONG_TEMPLATE_EXPR") for c in body):
                m["string_templates"] += 1
            if node.children[0].text == '"""' or any("\n" in (c.text or "") for c in body):
                m["multiline_strings"] += 1
        elif k == "BINARY_EXPR":
            op = node.children[1].text
            m["binary_operators"] += 1
            if op in _LOGICAL:
                m["logical_operators"] += 1
                m["cyclomatic_complexity"] += 1
            elif op == "?:":
                m["elvis_count"] += 1
                m["cyclomatic_complexity"] += 1
        elif k == "ASSIGNMENT":
            m["assignment_count"] += 1
        elif k == "AS_EXPR":
            m["type_casts"] += 1
        elif k == "IS_EXPR":
            m["type_checks"] += 1
        elif k == "WHEN_CONDITION" and node.children and node.children[0].kind == "OPERATION" \
                and node.children[0].text in ("is", "!is"):
            m["type_checks"] += 1
        elif k == "SAFE_QUALIFIED":
            m["safe_calls"] += 1
        elif k == "POSTFIX_EXPR" and node.children[-1].text == "!!":
            m["not_null_assertions"] += 1

        if k in _QUALIFIED:
            chain = chain + 1 if chain else 1
            m["max_call_chain"] = max(m["max_call_chain"], chain)
        for i in range(len(node.children) - 1, -1, -1):
            c = node.children[i]
            # a chain continues only through the receiver side of a qualified expression
            c_chain = chain if (k in _QUALIFIED and i == 0 and c.kind in _QUALIFIED) else 0
            stack.append((c, ctrl, loops, tries, calls, c_chain, depth + 1))

    m["distinct_identifiers"] = len(idents)
    return np.array([m[name] for name in METRIC_NAMES], dtype=np.float64)


class MetricsVectorizer(TransformerMixin, BaseEstimator):
    """Stateless transformer: function units (or FUNCTION trees) to an (n, 51) array."""

    catalog_version = CATALOG_VERSION

    def fit(self, X, y=None):
        self.feature_names_in_ = None
        self.n_features_out_ = len(METRIC_NAMES)
        return self

    def transform(self, X) -> np.ndarray:
        rows = [compute_metrics(u) for u in X]
        if not rows:
            return np.zeros((0, len(METRIC_NAMES)))
        return np.vstack(rows)

    def get_feature_names_out(self, input_features=None):
        return np.array(METRIC_NAMES, dtype=object)
