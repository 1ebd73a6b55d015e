"""Outlier detectors and anomaly selection rules."""
from .autoencoder import (Autoencoder, DimensionMismatch, NonFiniteLoss, autoencoder_score,
                          autoencoder_train, hidden_width)
from .compiler_induced import (BYTECODE_LOUD, SOURCE_LOUD, Divergence, NoLinkedUnits,
                               compiler_induced_detect, normalize)
from .iforest import DegenerateData, IsolationForest, average_path_length, iforest_fit_score
from .lof import LocalOutlierFactor, lof_scores, local_outlier_factor
from .scores import AnomalyScoreSet, TooFewPoints, flag_count, top_k
from .thresholds import rms_flag, rms_threshold

__all__ = [
    "BYTECODE_LOUD", "SOURCE_LOUD", "AnomalyScoreSet", "Autoencoder", "DegenerateData",
    "DimensionMismatch", "Divergence", "IsolationForest", "LocalOutlierFactor", "NoLinkedUnits",
    "NonFiniteLoss", "TooFewPoints", "autoencoder_score", "autoencoder_train", "average_path_length",
    "compiler_induced_detect", "flag_count", "hidden_width", "iforest_fit_score",
    "local_outlier_factor", "lof_scores", "normalize", "rms_flag", "rms_threshold", "top_k",
]
