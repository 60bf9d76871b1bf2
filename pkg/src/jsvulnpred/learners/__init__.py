"""The ten classifiers, a training entry point and hyperparameter grids."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import ConfigError
from .base import Learner, Scaler, TrainedModel, check_features, check_labels
from .nets import CDNN, SDNN
from .simple import KNN, GaussianNB, LinearRegression, LogisticRegression, ZeroR
from .svm import SVM
from .tree import DecisionTree, RandomForest

REGISTRY: dict[str, type[Learner]] = {
    cls.name: cls
    for cls in (
        RandomForest,
        DecisionTree,
        KNN,
        SVM,
        LinearRegression,
        LogisticRegression,
        GaussianNB,
        ZeroR,
        SDNN,
        CDNN,
    )
}
ALGORITHMS = list(REGISTRY)

# keys a grid may carry besides learner hyperparameters
RESAMPLE_KEYS = ("resample_mode", "resample_ratio")


def learner_class(algorithm: str) -> type[Learner]:
    try:
        return REGISTRY[algorithm]
    except KeyError:
        raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}") from None


def train(
    algorithm: str,
    hyperparameters: dict[str, Any] | None,
    X,
    y,
    dev: tuple | None = None,
    seed: int = 0,
    columns: list[str] | None = None,
    **extra,
) -> TrainedModel:
    """Fit one model; scaling statistics come from the training rows only."""
    cls = learner_class(algorithm)
    params = dict(hyperparameters or {})
    learner = cls(seed=seed, **params, **extra)
    X = check_features(X)
    y = check_labels(y)
    if len(y) == 0:
        raise ConfigError("cannot train on an empty dataset")
    scaler = Scaler.fit(X) if cls.scaled else None
    Xs = scaler.transform(X) if scaler else X
    dev_s = None
    if dev is not None:
        dX = check_features(dev[0])
        dev_s = (scaler.transform(dX) if scaler else dX, check_labels(dev[1]))
    learner.fit(Xs, y, dev_s)
    cols = list(columns) if columns is not None else [f"f{i}" for i in range(X.shape[1])]
    return TrainedModel(algorithm, learner.params, seed, cols, learner, scaler)


def predict(model: TrainedModel, X, columns: list[str] | None = None) -> np.ndarray:
    return model.predict(X, columns)


def load_model(text: str) -> TrainedModel:
    return TrainedModel.from_json(text, REGISTRY)


DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "RFC": {"n_trees": [50, 100, 200]},
    "DT": {"max_depth": [5, 10, 20, None], "min_samples_split": [2, 10]},
    "KNN": {"k": [1, 3, 5, 9, 15]},
    "SVM": {"C": [0.1, 1.0, 10.0], "kernel": ["linear", "rbf"]},
    "LinReg": {},
    "LogReg": {"l2": [0.0, 1e-4, 1e-2]},
    "NB": {},
    "ZeroR": {},
    "SDNN": {"layers": [[64, 32], [128, 64, 32]], "lr": [0.01, 0.05]},
    "CDNN": {"layers": [[64, 32], [128, 64, 32]], "lr": [0.05, 0.1]},
}


@dataclass
class HyperGrid:
    algorithm: str
    grid: dict[str, list]

    def __post_init__(self):
        cls = learner_class(self.algorithm)
        for name, values in self.grid.items():
            if name not in cls.defaults and name not in RESAMPLE_KEYS:
                raise ConfigError(f"{self.algorithm}: unknown hyperparameter {name!r}")
            if not isinstance(values, list) or not values:
                raise ConfigError(f"{self.algorithm}: grid for {name!r} must be a non-empty list")

    def configs(self) -> list[dict[str, Any]]:
        """Cartesian product over parameter names in sorted order."""
        names = sorted(self.grid)
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.grid[n] for n in names))]

    def __len__(self) -> int:
        return len(self.configs())

    @classmethod
    def default(cls, algorithm: str) -> "HyperGrid":
        return cls(algorithm, json.loads(json.dumps(DEFAULT_GRIDS[learner_class(algorithm).name])))

    @classmethod
    def from_mapping(cls, algorithm: str, data: dict) -> "HyperGrid":
        """Accept either ``{param: [values]}`` or ``{algorithm: {param: [values]}}``."""
        if algorithm in data and isinstance(data[algorithm], dict):
            data = data[algorithm]
        return cls(algorithm, dict(data))


__all__ = [
    "ALGORITHMS",
    "DEFAULT_GRIDS",
    "REGISTRY",
    "HyperGrid",
    "TrainedModel",
    "learner_class",
    "load_model",
    "predict",
    "train",
]
