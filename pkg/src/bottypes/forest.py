"""Seeded random forest for binary classification, with a JSON model format.

Trees are CART (Gini) grown on bootstrap samples with a random feature
subset per split. Every leaf stores the fraction of positive training
samples, and the forest's probability is the mean over trees.

Model file (``format = "bottypes.forest"``, ``version = 1``)::

    {
      "format": "bottypes.forest", "version": 1,
      "seed": 0,
      "hyperparameters": {"n_trees": .., "max_depth": .., "min_samples_leaf": ..,
                          "max_features": .., "bootstrap": ..},
      "feature_names": [...],
      "trees": [{"feature": [...], "threshold": [...], "left": [...],
                 "right": [...], "value": [...]}, ...]
    }

Node ``i`` is a leaf when ``feature[i] == -1``; otherwise samples with
``x[feature[i]] <= threshold[i]`` go to ``left[i]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

FORMAT = "bottypes.forest"
VERSION = 1


@dataclass
class Tree:
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def _add(self, feature: int, threshold: float, value: float) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        for r in range(X.shape[0]):
            i = 0
            while self.feature[i] != -1:
                i = self.left[i] if X[r, self.feature[i]] <= self.threshold[i] else self.right[i]
            out[r] = self.value[i]
        return out

    def to_dict(self) -> dict:
        return {k: list(getattr(self, k)) for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            [int(v) for v in d["feature"]],
            [float(v) for v in d["threshold"]],
            [int(v) for v in d["left"]],
            [int(v) for v in d["right"]],
            [float(v) for v in d["value"]],
        )


def _best_split(X: np.ndarray, y: np.ndarray, features: Sequence[int], min_leaf: int):
    """Lowest weighted Gini split over ``features``; first best wins ties."""
    n = len(y)
    best = None
    best_score = math.inf
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs, ys = X[order, f], y[order]
        pos_left = np.cumsum(ys)[:-1]
        n_left = np.arange(1, n)
        n_right = n - n_left
        pos_right = ys.sum() - pos_left
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        # n * weighted gini / 2, written symmetrically in the two classes
        score = pos_left * (n_left - pos_left) / n_left + pos_right * (n_right - pos_right) / n_right
        score = np.where(valid, score, np.inf)
        k = int(np.argmin(score))
        if score[k] < best_score - 1e-12:
            best_score = float(score[k])
            best = (f, float((xs[k] + xs[k + 1]) / 2.0))
    return best


def _grow(X, y, rng, max_depth, min_leaf, n_sub) -> Tree:
    tree = Tree()
    stack = [(np.arange(len(y)), 0, None, None)]
    while stack:
        idx, depth, parent, side = stack.pop()
        ys = y[idx]
        node = tree._add(-1, 0.0, float(ys.mean()))
        if parent is not None:
            (tree.left if side == "L" else tree.right)[parent] = node
        pure = ys.min() == ys.max()
        if pure or len(idx) < 2 * min_leaf or (max_depth is not None and depth >= max_depth):
            continue
        feats = sorted(rng.choice(X.shape[1], size=n_sub, replace=False).tolist())
        split = _best_split(X[idx], ys, feats, min_leaf)
        if split is None:
            continue
        f, thr = split
        tree.feature[node] = f
        tree.threshold[node] = thr
        mask = X[idx, f] <= thr
        stack.append((idx[~mask], depth + 1, node, "R"))
        stack.append((idx[mask], depth + 1, node, "L"))
    return tree


class RandomForest:
    """Bagged CART ensemble returning P(positive class)."""

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int | None = 10,
        min_samples_leaf: int = 1,
        max_features: str | int = "sqrt",
        bootstrap: bool = True,
        seed: int = 0,
        feature_names: Sequence[str] | None = None,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.feature_names = list(feature_names) if feature_names is not None else None
        self.trees: list[Tree] = []

    def _n_sub(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if self.max_features in (None, "all"):
            return n_features
        return max(1, min(int(self.max_features), n_features))

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or len(X) != len(y):
            raise ValueError("X must be 2-D with one row per label")
        if not np.isfinite(X).all():
            raise ValueError("training features contain NaN or inf")
        rng = np.random.default_rng(self.seed)
        n_sub = self._n_sub(X.shape[1])
        self.trees = []
        for _ in range(self.n_trees):
            idx = rng.integers(0, len(y), size=len(y)) if self.bootstrap else np.arange(len(y))
            self.trees.append(_grow(X[idx], y[idx], rng, self.max_depth, self.min_samples_leaf, n_sub))
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if not self.trees:
            raise RuntimeError("forest is not trained")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        total = np.zeros(X.shape[0])
        for t in self.trees:
            total += t.predict(X)
        return total / len(self.trees)

    def hyperparameters(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
        }

    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "version": VERSION,
            "seed": self.seed,
            "hyperparameters": self.hyperparameters(),
            "feature_names": self.feature_names,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForest":
        if d.get("format") != FORMAT or d.get("version") != VERSION:
            raise ValueError(f"not a {FORMAT} v{VERSION} model")
        model = cls(seed=d["seed"], feature_names=d.get("feature_names"), **d["hyperparameters"])
        model.trees = [Tree.from_dict(t) for t in d["trees"]]
        return model

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RandomForest":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
