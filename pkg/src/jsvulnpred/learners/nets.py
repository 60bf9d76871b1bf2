"""Fully connected networks: a plain SGD trainer and a dev-validated variant.

The network ends in a single sigmoid unit trained on binary cross-entropy.
The validated variant scores the dev set after every epoch; an epoch that
scores strictly worse than the best so far is a miss, after which the best
weights are restored and the learning rate is halved. Training stops after
``max_misses`` misses or ``epochs`` epochs.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import ConfigError
from .base import Learner
from .simple import sigmoid

Params = list[tuple[np.ndarray, np.ndarray]]


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    if name == "sigmoid":
        return sigmoid(z)
    raise ConfigError(f"unknown activation {name!r}")


def _act_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0).astype(float)
    if name == "tanh":
        return 1.0 - a * a
    return a * (1.0 - a)


def init_params(sizes: list[int], activation: str, rng: np.random.Generator) -> Params:
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = np.sqrt((2.0 if activation == "relu" else 1.0) / fan_in)
        params.append((rng.normal(0.0, scale, (fan_in, fan_out)), np.zeros(fan_out)))
    return params


def forward(params: Params, X: np.ndarray, activation: str):
    """Return pre-activations and activations of every layer; the last is the logit."""
    zs, acts = [], [X]
    a = X
    for k, (W, b) in enumerate(params):
        z = a @ W + b
        zs.append(z)
        a = z if k == len(params) - 1 else _act(activation, z)
        acts.append(a)
    return zs, acts


def loss_and_grads(params: Params, X: np.ndarray, y: np.ndarray, activation: str, l2: float = 0.0):
    """Mean binary cross-entropy (plus ``l2/2`` weight decay) and per-layer gradients."""
    zs, acts = forward(params, X, activation)
    logit = zs[-1][:, 0]
    loss = float(np.mean(np.logaddexp(0.0, logit) - y * logit))
    loss += 0.5 * l2 * sum(float(np.sum(W * W)) for W, _ in params)
    delta = ((sigmoid(logit) - y) / len(y))[:, None]
    grads: Params = [None] * len(params)  # type: ignore[list-item]
    for k in range(len(params) - 1, -1, -1):
        W, _ = params[k]
        grads[k] = (acts[k].T @ delta + l2 * W, delta.sum(axis=0))
        if k > 0:
            delta = (delta @ W.T) * _act_grad(activation, zs[k - 1], acts[k])
    return loss, grads


def f_measure_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    return 2 * tp / (2 * tp + fp + fn) if tp else 0.0


def accuracy_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    return float(np.mean(y_true == y_pred)) if len(y_true) else 0.0


DEV_SCORES: dict[str, Callable[[np.ndarray, np.ndarray], float]] = {
    "f_measure": f_measure_score,
    "accuracy": accuracy_score,
}


class SDNN(Learner):
    name = "SDNN"
    defaults = {
        "layers": [64, 32],
        "activation": "relu",
        "lr": 0.05,
        "epochs": 30,
        "batch_size": 64,
        "l2": 0.0,
    }
    scaled = True
    probabilistic = True

    def _setup(self, d: int) -> np.random.Generator:
        rng = np.random.default_rng(self.seed)
        sizes = [d] + [int(h) for h in self.params["layers"]] + [1]
        self.net = init_params(sizes, self.params["activation"], rng)
        return rng

    def _epoch(self, X, y, rng, lr) -> None:
        order = rng.permutation(len(y))
        bs = self.params["batch_size"]
        for lo in range(0, len(y), bs):
            idx = order[lo:lo + bs]
            _, grads = loss_and_grads(self.net, X[idx], y[idx], self.params["activation"], self.params["l2"])
            self.net = [(W - lr * gW, b - lr * gb) for (W, b), (gW, gb) in zip(self.net, grads)]

    def fit(self, X, y, dev=None):
        rng = self._setup(X.shape[1])
        y = np.asarray(y, dtype=float)
        for _ in range(self.params["epochs"]):
            self._epoch(X, y, rng, self.params["lr"])
        return self

    def decision(self, X):
        zs, _ = forward(self.net, X, self.params["activation"])
        return sigmoid(zs[-1][:, 0])

    def get_state(self):
        return {"net": [[W, b] for W, b in self.net]}

    def set_state(self, state):
        self.net = [
            (np.array(W, dtype=float).reshape(len(W), -1), np.array(b, dtype=float))
            for W, b in state["net"]
        ]


class CDNN(SDNN):
    name = "CDNN"
    defaults = {**SDNN.defaults, "epochs": 60, "max_misses": 4, "dev_metric": "f_measure", "dev_fraction": 0.1}

    def __init__(self, seed: int = 0, score: Callable[[np.ndarray, np.ndarray], float] | None = None, **params):
        super().__init__(seed, **params)
        if score is None and self.params["dev_metric"] not in DEV_SCORES:
            raise ConfigError(f"unknown dev metric {self.params['dev_metric']!r}")
        self.score = score or DEV_SCORES[self.params["dev_metric"]]
        self.history: list[dict] = []

    def _holdout(self, X, y, rng):
        """Stratified dev holdout carved from the training data."""
        dev_idx = []
        for cls in (0, 1):
            idx = rng.permutation(np.flatnonzero(y == cls))
            dev_idx.extend(idx[: int(round(len(idx) * self.params["dev_fraction"]))].tolist())
        mask = np.zeros(len(y), dtype=bool)
        mask[dev_idx] = True
        return X[~mask], y[~mask], X[mask], y[mask]

    def fit(self, X, y, dev=None):
        rng = self._setup(X.shape[1])
        y = np.asarray(y, dtype=float)
        if dev is None:
            X, y, dev_X, dev_y = self._holdout(X, y, rng)
        else:
            dev_X, dev_y = dev[0], np.asarray(dev[1], dtype=float)
        lr = self.params["lr"]
        best_score, best_net = -np.inf, [(W.copy(), b.copy()) for W, b in self.net]
        misses = 0
        self.history = []
        for epoch in range(self.params["epochs"]):
            self._epoch(X, y, rng, lr)
            pred = (self.decision(dev_X) >= 0.5).astype(int)
            score = float(self.score(dev_y.astype(int), pred))
            miss = score < best_score
            self.history.append({"epoch": epoch, "score": score, "lr": lr, "miss": miss})
            if miss:
                self.net = [(W.copy(), b.copy()) for W, b in best_net]
                lr /= 2.0
                misses += 1
                if misses >= self.params["max_misses"]:
                    break
            else:
                best_score = score
                best_net = [(W.copy(), b.copy()) for W, b in self.net]
        self.final_lr = lr
        return self
