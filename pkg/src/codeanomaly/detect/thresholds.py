from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .scores import AnomalyScoreSet, default_ids


def rms_threshold(scores, multiplier: float = 3.0) -> tuple[float, np.ndarray]:
    """``multiplier * sqrt(mean(s**2))`` and the boolean mask of scores strictly above it."""
    s = np.asarray(scores, dtype=np.float64)
    if s.size == 0:
        raise ValueError("rms threshold of an empty score list")
    threshold = multiplier * math.sqrt(float(np.mean(s * s)))
    return threshold, s > threshold


def rms_flag(scores, detector: str, multiplier: float = 3.0,
             unit_ids: Optional[Sequence[str]] = None, params: Optional[dict] = None) -> AnomalyScoreSet:
    s = np.asarray(scores, dtype=np.float64)
    ids = default_ids(len(s), unit_ids)
    threshold, mask = rms_threshold(s, multiplier)
    flagged = sorted(u for u, m in zip(ids, mask) if m)
    return AnomalyScoreSet(detector, ids, s, threshold, flagged,
                           {"rms_multiplier": multiplier, **(params or {})})
