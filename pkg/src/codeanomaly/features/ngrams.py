"""Implicit representation: N-grams over tree chains and bytecode windows."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus.units import BytecodeUnit, CodeUnit
from ..parser import SyntaxNode

Gram = tuple[str, ...]


class EmptySequence(ValueError):
    pass


class EmptyVocabulary(ValueError):
    pass


def extract_tree_ngrams(tree: SyntaxNode, nmax: int = 3) -> Counter:
    """Count every downward parent-child chain of 1..nmax node kinds.

    Each chain is counted once, at its lowest node: the chains ending at a
    node are the suffixes of its ancestor path.
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    counts: Counter = Counter()
    stack: list[tuple[SyntaxNode, tuple]] = [(tree, ())]
    while stack:
        node, above = stack.pop()
        path = (above + (node.kind,))[-nmax:]
        for n in range(1, len(path) + 1):
            counts[path[-n:]] += 1
        # keep only what a descendant chain can still use
        tail = path[-(nmax - 1):] if nmax > 1 else ()
        stack.extend((c, tail) for c in node.children)
    return counts


def extract_bytecode_ngrams(instructions: Sequence[str], nmax: int = 3, window: int = 3) -> Counter:
    """Slide a window over the sequence, emitting only the grams that start at its head.

    Every contiguous 1..nmax-gram is thus counted exactly once, independently
    of the window size.
    """
    if not 1 <= nmax <= window:
        raise ValueError("need window >= nmax >= 1")
    if len(instructions) == 0:
        raise EmptySequence("instruction sequence is empty")
    seq = tuple(instructions)
    counts: Counter = Counter()
    for head in range(len(seq)):
        win = seq[head:head + window]
        for n in range(1, min(nmax, len(win)) + 1):
            counts[win[:n]] += 1
    return counts


@dataclass
class NGramVocabulary:
    """Document-frequency-filtered N-gram index."""

    domain: str
    grams: list[Gram] = field(default_factory=list)
    df: list[int] = field(default_factory=list)
    min_df: int = 5
    max_df_ratio: float = 0.5
    n_documents: int = 0

    def __post_init__(self):
        self.index = {g: i for i, g in enumerate(self.grams)}

    def __len__(self) -> int:
        return len(self.grams)

    def __contains__(self, gram) -> bool:
        return tuple(gram) in self.index

    def entry(self, gram) -> tuple[int, int]:
        i = self.index[tuple(gram)]
        return i, self.df[i]

    def to_dict(self) -> dict:
        return {"domain": self.domain, "min_df": self.min_df, "max_df_ratio": self.max_df_ratio,
                "n_documents": self.n_documents,
                "entries": [[list(g), d] for g, d in zip(self.grams, self.df)]}

    @classmethod
    def from_dict(cls, d: dict) -> NGramVocabulary:
        return cls(d["domain"], [tuple(g) for g, _ in d["entries"]], [int(x) for _, x in d["entries"]],
                   d["min_df"], d["max_df_ratio"], d["n_documents"])


def build_vocabulary(counts: Sequence[Counter], min_df: int = 5, max_df_ratio: float = 0.5,
                     domain: str = "tree") -> NGramVocabulary:
    """Keep grams with ``min_df <= df <= max_df_ratio * n``; index by descending df, then gram."""
    n = len(counts)
    if n == 0:
        raise EmptyVocabulary("no documents to build a vocabulary from")
    df: Counter = Counter()
    for c in counts:
        df.update(g for g, v in c.items() if v > 0)
    cap = max_df_ratio * n
    kept = sorted(((g, d) for g, d in df.items() if min_df <= d <= cap), key=lambda gd: (-gd[1], gd[0]))
    if not kept:
        raise EmptyVocabulary(f"df filter [{min_df}, {cap:g}] removed all {len(df)} n-grams")
    return NGramVocabulary(domain, [g for g, _ in kept], [d for _, d in kept], min_df, max_df_ratio, n)


@dataclass(frozen=True)
class SparseVector:
    dimension: int
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        idx = [i for i, _ in self.pairs]
        if any(b <= a for a, b in zip(idx, idx[1:])) or any(not 0 <= i < self.dimension for i in idx):
            raise ValueError("sparse indices must be strictly increasing and within dimension")
        if any(v <= 0 for _, v in self.pairs):
            raise ValueError("sparse counts must be positive")

    def total(self) -> int:
        return sum(v for _, v in self.pairs)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        for i, v in self.pairs:
            out[i] = v
        return out


def vectorize(counts: Counter, vocab: NGramVocabulary) -> SparseVector:
    """Project a gram multiset onto the vocabulary; out-of-vocabulary grams are dropped."""
    if len(vocab) == 0:
        raise EmptyVocabulary("vocabulary is empty")
    pairs = sorted((vocab.index[g], v) for g, v in counts.items() if v > 0 and g in vocab.index)
    return SparseVector(len(vocab), tuple(pairs))


def _as_tree(x) -> SyntaxNode:
    return x.tree if isinstance(x, CodeUnit) else x


def _as_instructions(x) -> Sequence[str]:
    return x.instructions if isinstance(x, BytecodeUnit) else x


class NGramVectorizer(TransformerMixin, BaseEstimator):
    """Bag of N-grams over function trees (``domain="tree"``) or class bytecode.

    ``fit`` builds the document-frequency filtered vocabulary, ``transform``
    returns a CSR count matrix of shape (n_units, len(vocabulary_)).
    """

    def __init__(self, domain: str = "tree", nmax: int = 3, window: int = 3, min_df: int = 5,
                 max_df: float = 0.5):
        self.domain = domain
        self.nmax = nmax
        self.window = window
        self.min_df = min_df
        self.max_df = max_df

    def _count(self, X: Iterable) -> list[Counter]:
        if self.domain == "tree":
            return [extract_tree_ngrams(_as_tree(x), self.nmax) for x in X]
        if self.domain == "bytecode":
            return [extract_bytecode_ngrams(_as_instructions(x), self.nmax, self.window) for x in X]
        raise ValueError(f"unknown domain {self.domain!r}")

    def fit(self, X, y=None):
        self.vocabulary_ = build_vocabulary(self._count(X), self.min_df, self.max_df, self.domain)
        return self

    def fit_transform(self, X, y=None):
        counts = self._count(X)
        self.vocabulary_ = build_vocabulary(counts, self.min_df, self.max_df, self.domain)
        return self._matrix(counts)

    def transform(self, X) -> sp.csr_matrix:
        check_is_fitted(self, "vocabulary_")
        return self._matrix(self._count(X))

    def _matrix(self, counts: list[Counter]) -> sp.csr_matrix:
        index = self.vocabulary_.index
        indptr, indices, data = [0], [], []
        for c in counts:
            row = sorted((index[g], v) for g, v in c.items() if g in index)
            indices.extend(i for i, _ in row)
            data.extend(v for _, v in row)
            indptr.append(len(indices))
        return sp.csr_matrix((np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64),
                              np.asarray(indptr, dtype=np.int64)),
                             shape=(len(counts), len(self.vocabulary_)))

    def get_feature_names_out(self, input_features: Optional[Sequence] = None):
        check_is_fitted(self, "vocabulary_")
        return np.array([">".join(g) for g in self.vocabulary_.grams], dtype=object)
