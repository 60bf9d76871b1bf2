"""Nearest neighbours, Gaussian naive Bayes, linear models and the majority baseline."""

from __future__ import annotations

import numpy as np

from .base import Learner, check_labels

VAR_FLOOR = 1e-9


class ZeroR(Learner):
    name = "ZeroR"
    defaults: dict = {}
    probabilistic = True

    def fit(self, X, y, dev=None):
        pos = int(np.sum(y))
        self.label = 1 if pos > len(y) - pos else 0
        return self

    def decision(self, X):
        return np.full(len(X), float(self.label))

    def get_state(self):
        return {"label": self.label}

    def set_state(self, state):
        self.label = int(state["label"])


class KNN(Learner):
    name = "KNN"
    defaults = {"k": 5, "chunk": 512}
    scaled = True
    probabilistic = True

    def fit(self, X, y, dev=None):
        if self.params["k"] < 1:
            raise ValueError("k must be positive")
        self.X = np.array(X, dtype=float)
        self.y = np.array(y, dtype=int)
        return self

    def neighbours(self, X) -> np.ndarray:
        """Indices of the k nearest training rows; equal distances keep training order."""
        k = min(self.params["k"], len(self.X))
        sq_train = np.einsum("ij,ij->i", self.X, self.X)
        out = np.empty((len(X), k), dtype=int)
        step = self.params["chunk"]
        for lo in range(0, len(X), step):
            block = X[lo:lo + step]
            d2 = (
                np.einsum("ij,ij->i", block, block)[:, None]
                - 2.0 * block @ self.X.T
                + sq_train[None, :]
            )
            d2 = np.maximum(d2, 0.0)
            out[lo:lo + step] = np.argsort(d2, axis=1, kind="stable")[:, :k]
        return out

    def decision(self, X):
        return self.y[self.neighbours(X)].mean(axis=1)

    def predict(self, X):
        # a tied vote goes to the negative class
        votes = self.y[self.neighbours(X)]
        return (2 * votes.sum(axis=1) > votes.shape[1]).astype(int)

    def get_state(self):
        return {"X": self.X, "y": self.y}

    def set_state(self, state):
        self.X = np.array(state["X"], dtype=float).reshape(len(state["y"]), -1)
        self.y = np.array(state["y"], dtype=int)


class GaussianNB(Learner):
    name = "NB"
    defaults = {"var_floor": VAR_FLOOR}
    probabilistic = True

    def fit(self, X, y, dev=None):
        y = check_labels(y, need_both=True, name=self.name)
        self.prior = np.array([np.mean(y == c) for c in (0, 1)])
        self.mean = np.array([X[y == c].mean(axis=0) for c in (0, 1)])
        var = np.array([X[y == c].var(axis=0) for c in (0, 1)])
        self.var = np.maximum(var, self.params["var_floor"])
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        out = np.empty((len(X), 2))
        for c in (0, 1):
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var[c]))
            ll = ll - 0.5 * np.sum((X - self.mean[c]) ** 2 / self.var[c], axis=1)
            out[:, c] = np.log(self.prior[c]) + ll
        return out

    def decision(self, X):
        """Posterior probability of the positive class."""
        jll = self.joint_log_likelihood(X)
        top = jll.max(axis=1, keepdims=True)
        p = np.exp(jll - top)
        return p[:, 1] / p.sum(axis=1)

    def predict(self, X):
        jll = self.joint_log_likelihood(X)
        return (jll[:, 1] > jll[:, 0]).astype(int)

    def get_state(self):
        return {"prior": self.prior, "mean": self.mean, "var": self.var}

    def set_state(self, state):
        self.prior = np.array(state["prior"], dtype=float)
        self.mean = np.array(state["mean"], dtype=float)
        self.var = np.array(state["var"], dtype=float)


class LinearRegression(Learner):
    """Least squares on 0/1 targets; a prediction of 0.5 or more is positive."""

    name = "LinReg"
    defaults: dict = {}
    scaled = True

    def fit(self, X, y, dev=None):
        A = np.hstack([X, np.ones((len(X), 1))])
        coef, *_ = np.linalg.lstsq(A, np.asarray(y, dtype=float), rcond=None)
        self.w, self.b = coef[:-1], float(coef[-1])
        return self

    def decision(self, X):
        return X @ self.w + self.b

    def get_state(self):
        return {"w": self.w, "b": self.b}

    def set_state(self, state):
        self.w = np.array(state["w"], dtype=float)
        self.b = float(state["b"])


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy plus ``l2/2 * |w|^2`` and its gradient (dw, db)."""
    z = X @ w + b
    # log(1 + e^z) - y z, written to avoid overflow
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * float(w @ w)
    r = (sigmoid(z) - y) / len(y)
    return float(loss), X.T @ r + l2 * w, float(r.sum())


class LogisticRegression(Learner):
    name = "LogReg"
    defaults = {"lr": 0.5, "epochs": 500, "l2": 1e-4, "tol": 1e-8}
    scaled = True
    probabilistic = True

    def fit(self, X, y, dev=None):
        y = np.asarray(y, dtype=float)
        w = np.zeros(X.shape[1])
        b = 0.0
        lr, prev = self.params["lr"], np.inf
        for _ in range(self.params["epochs"]):
            loss, gw, gb = logistic_loss_and_grad(w, b, X, y, self.params["l2"])
            w -= lr * gw
            b -= lr * gb
            if prev - loss < self.params["tol"]:
                break
            prev = loss
        self.w, self.b = w, b
        return self

    def decision(self, X):
        return sigmoid(X @ self.w + self.b)

    def get_state(self):
        return {"w": self.w, "b": self.b}

    def set_state(self, state):
        self.w = np.array(state["w"], dtype=float)
        self.b = float(state["b"])
