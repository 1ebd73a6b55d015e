from __future__ import annotations

import re

# anomaly types used to classify reviewed anomalies, most important first
TAG_VOCABULARY: tuple[str, ...] = (
    "Delegates", "Type arguments", "When expression", "Annotations", "Call chains",
    "Enumerations in when", "If expressions", "Nested calls", "Similar call expressions",
    "Strange code constructs", "Assignments", "Large methods", "Code hierarchy",
    "Function parameters", "Multiline strings", "Try-catch expressions", "Arrays or maps",
    "Class references", "Concatenations", "Lambdas", "String literals", "Logical expressions",
    "Complex loops", "Similar code fragments", "Throw expressions", "Assertions",
    "Empty string literals", "Local variables", "Nested functions", "Type casts",
)
assert len(set(TAG_VOCABULARY)) == 30


class UnknownTag(ValueError):
    pass


def _key(name: str) -> str:
    return re.sub(r"\s+", " ", re.sub(r"[\"'`‘’“”]", "", name)).strip().lower()


_LOOKUP = {_key(t): t for t in TAG_VOCABULARY}


def canonical_tag(name: str, strict: bool = False) -> str:
    """Vocabulary spelling of ``name`` (quotes and case ignored); other names are free-form."""
    found = _LOOKUP.get(_key(name))
    if found is not None:
        return found
    if strict:
        raise UnknownTag(f"{name!r} is not in the tag vocabulary")
    cleaned = name.strip()
    if not cleaned:
        raise UnknownTag("empty tag")
    return cleaned


def is_vocabulary_tag(name: str) -> bool:
    return _key(name) in _LOOKUP
