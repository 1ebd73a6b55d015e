from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class TooFewPoints(ValueError):
    pass


def flag_count(contamination: float, n: int) -> int:
    """``ceil(contamination * n)``, rounded first so 0.001 * 1000 stays exactly 1."""
    if not 0 < contamination <= 0.5:
        raise ValueError(f"contamination must be in (0, 0.5], got {contamination}")
    return min(n, math.ceil(round(contamination * n, 9)))


def top_k(unit_ids: Sequence[str], keys: np.ndarray, k: int, largest: bool = True) -> list[str]:
    """The k units with the largest (or smallest) key; ties go to the smaller unit id."""
    keys = np.asarray(keys, dtype=np.float64)
    sign = -1.0 if largest else 1.0
    order = sorted(range(len(unit_ids)), key=lambda i: (sign * keys[i], unit_ids[i]))
    return [unit_ids[i] for i in order[:k]]


@dataclass
class AnomalyScoreSet:
    """Scores of one detector over one corpus plus the units it flagged."""

    detector: str
    unit_ids: list[str]
    scores: np.ndarray
    threshold: float
    flagged: list[str] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if len(self.unit_ids) != len(self.scores):
            raise ValueError("one score per unit required")
        known = set(self.unit_ids)
        if any(u not in known for u in self.flagged):
            raise ValueError("flagged units must be scored")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.unit_ids, self.scores.tolist()))

    def score_of(self, unit_id: str) -> float:
        return float(self.scores[self.unit_ids.index(unit_id)])

    def to_record(self) -> dict:
        rec = {"detector": self.detector, "threshold": self.threshold, "params": self.params,
               "flagged": list(self.flagged),
               "scores": [[u, float(s)] for u, s in zip(self.unit_ids, self.scores)]}
        for key, values in self.extra.items():
            rec[key] = [float(v) for v in values]
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> AnomalyScoreSet:
        ids = [u for u, _ in rec["scores"]]
        scores = np.array([s for _, s in rec["scores"]], dtype=np.float64)
        extra = {k: np.asarray(v, dtype=np.float64) for k, v in rec.items()
                 if k not in {"detector", "threshold", "params", "flagged", "scores"}}
        return cls(rec["detector"], ids, scores, rec["threshold"], list(rec["flagged"]),
                   rec.get("params", {}), extra)

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        # non-finite LOF scores are written as the JSON extensions Infinity/NaN
        path.write_text(json.dumps(self.to_record(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> AnomalyScoreSet:
        return cls.from_record(json.loads(Path(path).read_text(encoding="utf-8")))


def default_ids(n: int, unit_ids: Optional[Sequence[str]]) -> list[str]:
    if unit_ids is None:
        width = len(str(max(n - 1, 0)))
        return [f"p{i:0{width}d}" for i in range(n)]
    if len(unit_ids) != n:
        raise ValueError("unit_ids length does not match the number of points")
    return list(unit_ids)
