"""Metric vectors and N-gram count vectors for code units."""
from .metrics import (BINARY_SLOTS, CATALOG_VERSION, METRIC_NAMES, QUANTITATIVE, MetricsVectorizer,
                      compute_metrics)
from .ngrams import (EmptySequence, EmptyVocabulary, NGramVectorizer, NGramVocabulary, SparseVector,
                     build_vocabulary, extract_bytecode_ngrams, extract_tree_ngrams, vectorize)
from .store import VectorSet, load_vectors, save_vectors

__all__ = [
    "BINARY_SLOTS", "CATALOG_VERSION", "METRIC_NAMES", "QUANTITATIVE", "EmptySequence",
    "EmptyVocabulary", "MetricsVectorizer", "NGramVectorizer", "NGramVocabulary", "SparseVector",
    "VectorSet", "build_vocabulary", "compute_metrics", "extract_bytecode_ngrams",
    "extract_tree_ngrams", "load_vectors", "save_vectors", "vectorize",
]
