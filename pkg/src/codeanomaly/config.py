from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    pass


@dataclass
class FeatureConfig:
    n_metrics: int = 51
    nmax: int = 3
    window: int = 3
    min_df: int = 5
    max_df: float = 0.5
    bytecode_min_df: int = 5
    bytecode_max_df: float = 0.5


@dataclass
class PreprocessConfig:
    pca_k: int = 20
    scale_binary: bool = True


@dataclass
class LofConfig:
    n_neighbors: int = 20
    contamination: float = 0.001


@dataclass
class IForestConfig:
    n_estimators: int = 200
    max_samples: int = 256
    contamination: float = 0.0001


@dataclass
class AutoencoderConfig:
    rates: tuple = (0.25, 0.5, 0.75)
    epochs: int = 5
    batch_size: int = 1024
    learning_rate: float = 0.01
    optimizer: str = "sgd"
    rms_multiplier: float = 3.0


@dataclass
class CompilerInducedConfig:
    delta: float = 0.8
    normalization: str = "max"


@dataclass
class PipelineConfig:
    features: FeatureConfig = field(default_factory=FeatureConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    lof: LofConfig = field(default_factory=LofConfig)
    iforest: IForestConfig = field(default_factory=IForestConfig)
    autoencoder: AutoencoderConfig = field(default_factory=AutoencoderConfig)
    compiler_induced: CompilerInducedConfig = field(default_factory=CompilerInducedConfig)
    seed: int = 0

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["autoencoder"]["rates"] = list(self.autoencoder.rates)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> PipelineConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        cfg = cls()
        for key, value in data.items():
            if key not in {f.name for f in dataclasses.fields(cls)}:
                raise ConfigError(f"unknown config section {key!r}")
            current = getattr(cfg, key)
            if not dataclasses.is_dataclass(current):
                setattr(cfg, key, _coerce(key, current, value))
                continue
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be an object")
            for sub, v in value.items():
                if not hasattr(current, sub):
                    raise ConfigError(f"unknown option {key}.{sub}")
                setattr(current, sub, _coerce(f"{key}.{sub}", getattr(current, sub), v))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> PipelineConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)

    def validate(self) -> None:
        a = self.autoencoder
        checks = [
            (self.features.nmax >= 1, "features.nmax must be >= 1"),
            (self.features.window >= self.features.nmax, "features.window must be >= nmax"),
            (0 < self.features.max_df <= 1, "features.max_df must be in (0, 1]"),
            (self.preprocess.pca_k >= 1, "preprocess.pca_k must be >= 1"),
            (self.lof.n_neighbors >= 1, "lof.n_neighbors must be >= 1"),
            (0 < self.lof.contamination <= 0.5, "lof.contamination must be in (0, 0.5]"),
            (0 < self.iforest.contamination <= 0.5, "iforest.contamination must be in (0, 0.5]"),
            (self.iforest.n_estimators >= 1, "iforest.n_estimators must be >= 1"),
            (all(0 < r <= 1 for r in a.rates) and len(a.rates) > 0, "autoencoder.rates must be in (0, 1]"),
            (a.epochs >= 1 and a.batch_size >= 1, "autoencoder epochs and batch_size must be >= 1"),
            (a.learning_rate > 0, "autoencoder.learning_rate must be positive"),
            (a.optimizer in ("sgd", "adam"), "autoencoder.optimizer must be sgd or adam"),
            (self.compiler_induced.normalization in ("max", "none"),
             "compiler_induced.normalization must be max or none"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)


def _coerce(name: str, current: Any, value: Any) -> Any:
    if isinstance(current, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be a boolean")
        return value
    if isinstance(current, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer")
        return value
    if isinstance(current, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number")
        return float(value)
    if isinstance(current, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{name} must be a list")
        return tuple(float(v) for v in value)
    if isinstance(current, str):
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string")
        return value
    return value
