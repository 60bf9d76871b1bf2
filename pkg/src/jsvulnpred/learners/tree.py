"""CART decision tree (Gini) and a bagged forest of them."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError
from .base import Learner


def gini_split(x: np.ndarray, y: np.ndarray, min_leaf: int) -> tuple[float, float] | None:
    """Best (weighted impurity, threshold) on one feature, lowest threshold on ties.

    Weighted impurity of a child with p positives among m samples is
    ``2 p (m - p) / m``; the returned value sums both children.
    """
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(xs)
    left_n = np.arange(1, n)
    left_p = np.cumsum(ys)[:-1].astype(float)
    total_p = float(ys.sum())
    valid = (xs[1:] > xs[:-1]) & (left_n >= min_leaf) & (n - left_n >= min_leaf)
    if not valid.any():
        return None
    right_n = n - left_n
    right_p = total_p - left_p
    imp = 2.0 * left_p * (left_n - left_p) / left_n + 2.0 * right_p * (right_n - right_p) / right_n
    imp = np.where(valid, imp, np.inf)
    k = int(np.argmin(imp))
    return float(imp[k]), float((xs[k] + xs[k + 1]) / 2.0)


def resolve_max_features(spec, d: int) -> int:
    if spec is None or spec == "all":
        return d
    if spec == "sqrt":
        return max(1, int(math.sqrt(d)))
    if spec == "log2":
        return max(1, int(math.log2(d))) if d > 1 else 1
    if isinstance(spec, float) and 0 < spec <= 1:
        return max(1, int(spec * d))
    if isinstance(spec, int) and spec >= 1:
        return min(spec, d)
    raise ConfigError(f"invalid max_features {spec!r}")


class DecisionTree(Learner):
    name = "DT"
    defaults = {"max_depth": None, "min_samples_split": 2, "min_samples_leaf": 1, "max_features": None}
    probabilistic = True

    def fit(self, X, y, dev=None):
        self._rng = np.random.default_rng(self.seed)
        n, d = X.shape
        self._mtry = resolve_max_features(self.params["max_features"], d)
        self.feature: list[int] = []
        self.threshold_: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self._grow(X, y.astype(int), 0)
        return self

    def _new_node(self, p: float) -> int:
        self.feature.append(-1)
        self.threshold_.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(p)
        return len(self.value) - 1

    def _grow(self, X, y, depth) -> int:
        # iterative to stay clear of the recursion limit on deep trees
        root = self._new_node(float(y.mean()) if len(y) else 0.0)
        stack = [(root, np.arange(len(y)), depth)]
        max_depth = self.params["max_depth"]
        min_split = self.params["min_samples_split"]
        min_leaf = self.params["min_samples_leaf"]
        d = X.shape[1]
        while stack:
            node, idx, depth = stack.pop()
            yi = y[idx]
            pos = int(yi.sum())
            if pos == 0 or pos == len(yi) or len(yi) < min_split:
                continue
            if max_depth is not None and depth >= max_depth:
                continue
            if self._mtry < d:
                feats = np.sort(self._rng.choice(d, self._mtry, replace=False))
            else:
                feats = np.arange(d)
            best = None
            for f in feats:
                res = gini_split(X[idx, f], yi, min_leaf)
                if res is not None and (best is None or res[0] < best[0]):
                    best = (res[0], res[1], int(f))
            if best is None:
                continue
            _, thr, f = best
            mask = X[idx, f] <= thr
            li, ri = idx[mask], idx[~mask]
            left = self._new_node(float(y[li].mean()))
            right = self._new_node(float(y[ri].mean()))
            self.feature[node], self.threshold_[node] = f, thr
            self.left[node], self.right[node] = left, right
            stack.append((right, ri, depth + 1))
            stack.append((left, li, depth + 1))
        return root

    def decision(self, X):
        feature = np.array(self.feature)
        thr = np.array(self.threshold_)
        left = np.array(self.left)
        right = np.array(self.right)
        value = np.array(self.value)
        node = np.zeros(len(X), dtype=int)
        active = feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            go_left = X[rows, feature[cur]] <= thr[cur]
            node[rows] = np.where(go_left, left[cur], right[cur])
            active = feature[node] >= 0
        return value[node]

    def predict(self, X):
        # an evenly split leaf votes negative
        return (self.decision(X) > 0.5).astype(int)

    @property
    def depth(self) -> int:
        depth = {0: 0}
        for n, (l, r) in enumerate(zip(self.left, self.right)):
            if l >= 0:
                depth[l] = depth[r] = depth[n] + 1
        return max(depth.values())

    def get_state(self):
        return {
            "feature": self.feature,
            "threshold": self.threshold_,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    def set_state(self, state):
        self.feature = [int(v) for v in state["feature"]]
        self.threshold_ = [float(v) for v in state["threshold"]]
        self.left = [int(v) for v in state["left"]]
        self.right = [int(v) for v in state["right"]]
        self.value = [float(v) for v in state["value"]]


class RandomForest(Learner):
    name = "RFC"
    defaults = {
        "n_trees": 100,
        "max_features": "sqrt",
        "max_depth": None,
        "min_samples_split": 2,
        "min_samples_leaf": 1,
        "bootstrap": True,
    }
    probabilistic = True

    def fit(self, X, y, dev=None):
        n = len(y)
        seeds = np.random.SeedSequence(self.seed).generate_state(self.params["n_trees"])
        self.trees: list[DecisionTree] = []
        for s in seeds:
            rng = np.random.default_rng(int(s))
            idx = rng.integers(0, n, n) if self.params["bootstrap"] else np.arange(n)
            tree = DecisionTree(
                seed=int(rng.integers(0, 2**31 - 1)),
                max_depth=self.params["max_depth"],
                min_samples_split=self.params["min_samples_split"],
                min_samples_leaf=self.params["min_samples_leaf"],
                max_features=self.params["max_features"],
            )
            tree.fit(X[idx], y[idx])
            self.trees.append(tree)
        return self

    def votes(self, X) -> np.ndarray:
        return np.array([t.predict(X) for t in self.trees])

    def decision(self, X):
        """Fraction of trees voting positive."""
        return self.votes(X).mean(axis=0)

    def predict(self, X):
        # strict majority; a tied vote goes to the negative class
        v = self.votes(X)
        return (2 * v.sum(axis=0) > len(self.trees)).astype(int)

    def get_state(self):
        return {"trees": [t.get_state() for t in self.trees]}

    def set_state(self, state):
        self.trees = []
        for ts in state["trees"]:
            t = DecisionTree()
            t.set_state(ts)
            self.trees.append(t)
