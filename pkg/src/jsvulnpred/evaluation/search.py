"""Grid search over hyperparameters, scored on a dev split or by k-fold CV."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..dataset.resample import ResamplePlan, resample_indices
from ..dataset.split import SplitSpec, fold_indices, split_indices
from ..dataset.table import Dataset
from ..errors import JsVulnError
from ..learners import RESAMPLE_KEYS, HyperGrid, train
from .measures import ConfusionMatrix, IRMetrics, confusion, ir_measures

OBJECTIVES = ("f_measure", "precision")


def _value(metrics: IRMetrics, name: str) -> float:
    v = getattr(metrics, name)
    return -np.inf if v is None else float(v)


@dataclass
class GridResult:
    config: dict[str, Any]
    cm: ConfusionMatrix | None = None
    metrics: IRMetrics | None = None
    score: float = -np.inf  # objective value used for ranking
    other: float = -np.inf
    fold_scores: list[float] = field(default_factory=list)
    error: str | None = None

    @property
    def config_key(self) -> str:
        return json.dumps(self.config, sort_keys=True)


def split_config(config: dict[str, Any], semantics: str = "pos/neg") -> tuple[dict, ResamplePlan]:
    params = {k: v for k, v in config.items() if k not in RESAMPLE_KEYS}
    plan = ResamplePlan(
        config.get("resample_mode", "none"), float(config.get("resample_ratio", 1.0)), semantics
    )
    return params, plan


def fit_resampled(algorithm, params, plan, X, y, seed, dev=None, columns=None):
    idx = resample_indices(y, plan, seed) if plan.mode != "none" else np.arange(len(y))
    return train(algorithm, params, X[idx], y[idx], dev=dev, seed=seed, columns=columns)


def _evaluate(args) -> GridResult:
    algorithm, config, X, y, spec, mode, objective, semantics = args
    other = "precision" if objective == "f_measure" else "f_measure"
    result = GridResult(config)
    try:
        params, plan = split_config(config, semantics)
        if mode == "cv":
            total = np.zeros(4, dtype=int)
            folds = fold_indices(y, spec.k, spec.seed)
            per_fold = []
            for k, test_idx in enumerate(folds):
                train_idx = np.concatenate([f for j, f in enumerate(folds) if j != k])
                model = fit_resampled(algorithm, params, plan, X[train_idx], y[train_idx], spec.seed)
                cm = confusion(y[test_idx], model.predict(X[test_idx]))
                total += (cm.TP, cm.TN, cm.FP, cm.FN)
                m = ir_measures(cm)
                per_fold.append(max(_value(m, objective), 0.0))
            result.cm = ConfusionMatrix(*map(int, total))
            result.metrics = ir_measures(result.cm)
            result.fold_scores = per_fold
            result.score = float(np.mean(per_fold))
            result.other = _value(result.metrics, other)
        else:
            tr, dv, _ = split_indices(y, spec)
            model = fit_resampled(
                algorithm, params, plan, X[tr], y[tr], spec.seed, dev=(X[dv], y[dv])
            )
            result.cm = confusion(y[dv], model.predict(X[dv]))
            result.metrics = ir_measures(result.cm)
            result.score = _value(result.metrics, objective)
            result.other = _value(result.metrics, other)
    except (JsVulnError, ValueError, np.linalg.LinAlgError) as exc:
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def rank(results: list[GridResult]) -> list[GridResult]:
    """Best first: objective, then the other measure, then config text; failures last."""
    return sorted(
        results, key=lambda r: (r.error is not None, -r.score, -r.other, r.config_key)
    )


def grid_search(
    algorithm: str,
    grid: HyperGrid,
    data: Dataset,
    spec: SplitSpec,
    objective: str = "f_measure",
    mode: str = "dev",
    semantics: str = "pos/neg",
    workers: int = 1,
) -> list[GridResult]:
    """Train every grid configuration and return results ranked best first.

    ``mode="dev"`` trains on the training split and scores the dev split;
    ``mode="cv"`` reports the mean objective over ``spec.k`` stratified folds.
    Errors of single configurations are recorded on their result.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    if mode not in ("dev", "cv"):
        raise ValueError("mode must be 'dev' or 'cv'")
    jobs = [
        (algorithm, cfg, data.X, data.y, spec, mode, objective, semantics)
        for cfg in grid.configs()
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, jobs))
    else:
        results = [_evaluate(job) for job in jobs]
    return rank(results)


def cross_validate(algorithm: str, params: dict, data: Dataset, k: int = 10, seed: int = 0) -> list[float]:
    """Per-fold accuracy of one configuration."""
    accs = []
    folds = fold_indices(data.y, k, seed)
    for j, test_idx in enumerate(folds):
        train_idx = np.concatenate([f for i, f in enumerate(folds) if i != j])
        model = train(algorithm, params, data.X[train_idx], data.y[train_idx], seed=seed)
        accs.append(float(np.mean(model.predict(data.X[test_idx]) == data.y[test_idx])))
    return accs
