"""Shared learner plumbing: parameter schemas, scaling and the model envelope."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np

from ..errors import ConfigError, EmptyClass, FeatureManifestMismatch, NonFiniteFeature

MODEL_FORMAT = "jsvulnpred-model"
MODEL_VERSION = 1


def check_features(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("feature matrix must be two-dimensional")
    if not np.isfinite(X).all():
        rows, cols = np.nonzero(~np.isfinite(X))
        raise NonFiniteFeature(f"non-finite feature at row {rows[0]}, column {cols[0]}")
    return X


def check_labels(y: np.ndarray, need_both: bool = False, name: str = "") -> np.ndarray:
    y = np.asarray(y, dtype=int).ravel()
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    if need_both and (y.min(initial=1) != 0 or y.max(initial=0) != 1):
        raise EmptyClass(f"{name} needs samples of both classes")
    return y


@dataclass
class Scaler:
    """Z-score scaling from training statistics; constant columns pass through centered."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Scaler":
        mean = X.mean(axis=0) if len(X) else np.zeros(X.shape[1])
        std = X.std(axis=0) if len(X) else np.ones(X.shape[1])
        std = np.where(std > 0, std, 1.0)
        return cls(mean, std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(np.array(d["mean"], dtype=float), np.array(d["std"], dtype=float))


class Learner:
    """Base class. Subclasses declare ``name``, ``defaults`` and ``scaled``."""

    name: ClassVar[str] = ""
    defaults: ClassVar[dict[str, Any]] = {}
    scaled: ClassVar[bool] = False
    probabilistic: ClassVar[bool] = False

    def __init__(self, seed: int = 0, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigError(f"{self.name}: unknown hyperparameters {sorted(unknown)}")
        self.params = {**self.defaults, **params}
        self.seed = seed

    # subclasses implement these three
    def fit(self, X: np.ndarray, y: np.ndarray, dev: tuple[np.ndarray, np.ndarray] | None = None) -> "Learner":
        raise NotImplementedError

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Real-valued score; label 1 iff score is at or above ``threshold``."""
        raise NotImplementedError

    threshold: ClassVar[float] = 0.5

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision(X) >= self.threshold).astype(int)

    def get_state(self) -> dict:
        raise NotImplementedError

    def set_state(self, state: dict) -> None:
        raise NotImplementedError


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class TrainedModel:
    algorithm: str
    params: dict
    seed: int
    columns: list[str]
    learner: Learner
    scaler: Scaler | None = None
    info: dict = field(default_factory=dict)

    def _prepare(self, X, columns: list[str] | None) -> np.ndarray:
        if columns is not None and list(columns) != self.columns:
            raise FeatureManifestMismatch(
                f"model trained on {len(self.columns)} columns, got a different manifest"
            )
        X = check_features(X)
        if X.shape[1] != len(self.columns):
            raise FeatureManifestMismatch(f"expected {len(self.columns)} features, got {X.shape[1]}")
        return self.scaler.transform(X) if self.scaler is not None else X

    def predict(self, X, columns: list[str] | None = None) -> np.ndarray:
        return self.learner.predict(self._prepare(X, columns))

    def scores(self, X, columns: list[str] | None = None) -> np.ndarray | None:
        """Positive-class scores in [0, 1] for probabilistic models, else None."""
        if not self.learner.probabilistic:
            return None
        return self.learner.decision(self._prepare(X, columns))

    def to_json(self) -> str:
        envelope = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "algorithm": self.algorithm,
            "params": _jsonable(self.params),
            "seed": self.seed,
            "columns": list(self.columns),
            "scaler": self.scaler.to_dict() if self.scaler is not None else None,
            "info": _jsonable(self.info),
            "state": _jsonable(self.learner.get_state()),
        }
        return json.dumps(envelope, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, registry: dict[str, type[Learner]]) -> "TrainedModel":
        try:
            env = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"model file is not JSON: {exc}") from exc
        if env.get("format") != MODEL_FORMAT:
            raise ConfigError("not a model file")
        if env.get("version") != MODEL_VERSION:
            raise ConfigError(f"unsupported model version {env.get('version')}")
        algo = env["algorithm"]
        if algo not in registry:
            raise ConfigError(f"unknown algorithm {algo!r}")
        learner = registry[algo](seed=env["seed"], **env["params"])
        learner.set_state(env["state"])
        scaler = Scaler.from_dict(env["scaler"]) if env["scaler"] is not None else None
        return cls(algo, env["params"], env["seed"], env["columns"], learner, scaler, env.get("info", {}))
