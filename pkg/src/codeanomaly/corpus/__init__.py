"""Analysis units: functions from source or tree files, classes from bytecode listings."""
from .bytecode import JVM_OPCODES, FormatError, ingest_bytecode, javap_to_listing, parse_listing
from .ingest import (IngestLog, collect_sources, extract_functions, file_facade_class, ingest_source,
                     ingest_trees, link_units, serialize_trees)
from .store import Corpus, build_corpus
from .units import BytecodeUnit, CodeUnit, Origin, class_unit_id, dedup_units, tree_unit_id

__all__ = [
    "JVM_OPCODES", "BytecodeUnit", "CodeUnit", "Corpus", "FormatError", "IngestLog", "Origin",
    "build_corpus", "class_unit_id", "collect_sources", "dedup_units", "extract_functions",
    "file_facade_class", "ingest_bytecode", "ingest_source", "ingest_trees", "javap_to_listing",
    "link_units", "parse_listing", "serialize_trees", "tree_unit_id",
]
