"""Divergence between source-side and bytecode-side anomaly scores."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

log = logging.getLogger(__name__)

BYTECODE_LOUD = "bytecode-loud"
SOURCE_LOUD = "source-loud"


class NoLinkedUnits(ValueError):
    pass


@dataclass(frozen=True)
class Divergence:
    """One class whose two normalized scores differ by more than delta."""

    unit_id: str
    tree_score: float
    bytecode_score: float
    direction: str
    functions: tuple[str, ...]

    @property
    def gap(self) -> float:
        return abs(self.tree_score - self.bytecode_score)


def normalize(scores: Mapping[str, float], method: str = "max") -> dict[str, float]:
    """Divide by the corpus maximum (``"max"``) or leave untouched (``"none"``)."""
    if method == "none":
        return dict(scores)
    if method != "max":
        raise ValueError(f"unknown normalization {method!r}")
    top = max(scores.values(), default=0.0)
    if top <= 0:
        return {u: 0.0 for u in scores}
    return {u: s / top for u, s in scores.items()}


def compiler_induced_detect(tree_scores: Mapping[str, float], bytecode_scores: Mapping[str, float],
                            links: Mapping[str, Sequence[str]], delta: float = 0.8,
                            normalization: str = "max", strict: bool = False) -> list[Divergence]:
    """Flag classes whose bytecode score and aggregated function score differ by more than ``delta``.

    A class's source-side score is the maximum over its linked functions.
    Only classes present in ``bytecode_scores`` with at least one scored
    linked function are compared. With no comparable pair the result is
    empty and a warning is logged, or :class:`NoLinkedUnits` is raised when
    ``strict``.
    """
    t = normalize(tree_scores, normalization)
    b = normalize(bytecode_scores, normalization)
    out = []
    compared = 0
    for cls_id in sorted(links):
        if cls_id not in b:
            continue
        fns = tuple(f for f in links[cls_id] if f in t)
        if not fns:
            continue
        compared += 1
        ts = max(t[f] for f in fns)
        bs = b[cls_id]
        if abs(ts - bs) > delta:
            out.append(Divergence(cls_id, ts, bs, BYTECODE_LOUD if bs > ts else SOURCE_LOUD, fns))
    if compared == 0:
        msg = "no linked class/function pairs to compare"
        if strict:
            raise NoLinkedUnits(msg)
        log.warning(msg)
    return out
