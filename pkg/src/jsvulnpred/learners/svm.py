"""Soft-margin SVM trained by SMO with maximal-violating-pair selection.

Solves the dual ``min 1/2 a'Qa - e'a`` subject to ``0 <= a <= C`` and
``y'a = 0`` where ``Q_ij = y_i y_j K(x_i, x_j)`` and labels are +-1. Kernel
rows are computed on demand and kept in a bounded cache.
"""

from __future__ import annotations

from collections import OrderedDict

import numpy as np

from ..errors import ConfigError
from .base import Learner, check_labels

TAU = 1e-12


class KernelRows:
    def __init__(self, X: np.ndarray, kernel: str, gamma: float, capacity: int):
        self.X = X
        self.kernel = kernel
        self.gamma = gamma
        self.sq = np.einsum("ij,ij->i", X, X)
        self.cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self.capacity = max(2, capacity)

    def compute(self, Z: np.ndarray) -> np.ndarray:
        """K(X, Z) as an (n, len(Z)) matrix."""
        dot = self.X @ Z.T
        if self.kernel == "linear":
            return dot
        sq_z = np.einsum("ij,ij->i", Z, Z)
        d2 = np.maximum(self.sq[:, None] - 2.0 * dot + sq_z[None, :], 0.0)
        return np.exp(-self.gamma * d2)

    def row(self, i: int) -> np.ndarray:
        hit = self.cache.get(i)
        if hit is not None:
            self.cache.move_to_end(i)
            return hit
        r = self.compute(self.X[i:i + 1])[:, 0]
        self.cache[i] = r
        if len(self.cache) > self.capacity:
            self.cache.popitem(last=False)
        return r

    def diag(self) -> np.ndarray:
        if self.kernel == "linear":
            return self.sq.copy()
        return np.ones(len(self.X))


def smo(K: KernelRows, y: np.ndarray, C: float, tol: float, max_iter: int):
    """Return (alpha, rho, iterations)."""
    n = len(y)
    alpha = np.zeros(n)
    G = -np.ones(n)
    QD = K.diag()
    it = 0
    while it < max_iter:
        up = ((alpha < C) & (y > 0)) | ((alpha > 0) & (y < 0))
        low = ((alpha < C) & (y < 0)) | ((alpha > 0) & (y > 0))
        if not up.any() or not low.any():
            break
        score = -y * G
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        if score[i] - score[j] < tol:
            break
        it += 1
        Ki, Kj = K.row(i), K.row(j)
        Qi, Qj = y[i] * y * Ki, y[j] * y * Kj
        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(QD[i] + QD[j] + 2.0 * Qi[j], TAU)
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, diff
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, C - diff
            elif alpha[j] > C:
                alpha[j], alpha[i] = C, C + diff
        else:
            quad = max(QD[i] + QD[j] - 2.0 * Qi[j], TAU)
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, total - C
            elif alpha[j] < 0:
                alpha[j], alpha[i] = 0.0, total
            if total > C:
                if alpha[j] > C:
                    alpha[j], alpha[i] = C, total - C
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, total
        G += Qi * (alpha[i] - ai) + Qj * (alpha[j] - aj)

    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        at_upper = alpha >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (~at_upper & (y < 0))
        ub = yG[ub_mask].min() if ub_mask.any() else np.inf
        lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
        rho = float((ub + lb) / 2.0) if np.isfinite(ub) and np.isfinite(lb) else 0.0
    return alpha, rho, it


class SVM(Learner):
    name = "SVM"
    defaults = {
        "C": 1.0,
        "kernel": "rbf",
        "gamma": "scale",
        "tol": 1e-3,
        "max_iter": 100000,
        "cache_rows": 2000,
    }
    scaled = True
    threshold = 0.0

    def fit(self, X, y, dev=None):
        y = check_labels(y, need_both=True, name=self.name)
        kernel = self.params["kernel"]
        if kernel not in ("linear", "rbf"):
            raise ConfigError(f"unknown kernel {kernel!r}")
        gamma = self.params["gamma"]
        if gamma == "scale":
            var = float(X.var())
            gamma = 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        self.gamma_ = float(gamma)
        ys = np.where(y == 1, 1.0, -1.0)
        rows = KernelRows(X, kernel, self.gamma_, self.params["cache_rows"])
        alpha, rho, it = smo(rows, ys, float(self.params["C"]), self.params["tol"], self.params["max_iter"])
        sv = alpha > 0
        self.sv = X[sv]
        self.coef = alpha[sv] * ys[sv]
        self.rho = rho
        self.iterations = it
        return self

    def decision(self, X):
        if len(self.sv) == 0:
            return np.full(len(X), -self.rho)
        rows = KernelRows(self.sv, self.params["kernel"], self.gamma_, 2)
        out = np.empty(len(X))
        for lo in range(0, len(X), 1024):
            out[lo:lo + 1024] = self.coef @ rows.compute(X[lo:lo + 1024]) - self.rho
        return out

    def predict(self, X):
        return (self.decision(X) > 0).astype(int)

    def get_state(self):
        return {"sv": self.sv, "coef": self.coef, "rho": self.rho, "gamma": self.gamma_}

    def set_state(self, state):
        self.coef = np.array(state["coef"], dtype=float)
        self.sv = np.array(state["sv"], dtype=float).reshape(len(self.coef), -1)
        self.rho = float(state["rho"])
        self.gamma_ = float(state["gamma"])
