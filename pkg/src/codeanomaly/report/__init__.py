"""Pipeline orchestration, anomaly records, tagging and report files."""
from .emit import REPORT_SCHEMA, emit_report, load_report, parse_markdown, report_dict
from .pipeline import (EXPERIMENTS, EmptyCorpus, StageError, run_compiler_induced, run_experiment,
                       run_explicit, run_implicit)
from .records import (COMPILER_INDUCED, EXCERPT_LINES, SYNTAX_TREE, AnomalyRecord, DetectorEntry,
                      cap_excerpt, exclude, merge_records, sort_records, tag)
from .tags import TAG_VOCABULARY, UnknownTag, canonical_tag, is_vocabulary_tag

__all__ = [
    "COMPILER_INDUCED", "EXCERPT_LINES", "EXPERIMENTS", "REPORT_SCHEMA", "SYNTAX_TREE", "TAG_VOCABULARY",
    "AnomalyRecord", "DetectorEntry", "EmptyCorpus", "StageError", "UnknownTag", "canonical_tag",
    "cap_excerpt", "emit_report", "exclude", "is_vocabulary_tag", "load_report", "merge_records",
    "parse_markdown", "report_dict", "run_compiler_induced", "run_experiment", "run_explicit",
    "run_implicit", "sort_records", "tag",
]
