"""Random forest of Gini-split decision trees.

Each tree draws its own bootstrap sample and candidate features from
``default_rng(seed + tree_index)``, so the forest is the same whether trees are
grown serially or in worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from math import ceil, sqrt

import numpy as np

from curveml._parallel import ordered_map
from curveml.features import LabeledDataset


@dataclass(frozen=True)
class ForestHyper:
    num_trees: int = 100
    max_depth: int = 16
    min_leaf: int = 1
    seed: int = 0
    max_features: int | None = None  # default ceil(sqrt(d))


@dataclass
class Tree:
    """Flat node arrays. ``feature[i] == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, K) class histogram of the training rows reaching each node
    seed: int

    @property
    def depth(self) -> int:
        depth = np.zeros(len(self.feature), dtype=np.int64)
        for i in range(len(self.feature)):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[i] + 1
                depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                return node
            r = rows[active]
            n = node[active]
            go_left = X[r, f[active]] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.counts[self.apply(X)], axis=1)


@dataclass
class ForestModel:
    class_names: list[str]
    feature_dim: int
    max_features: int
    hyper: ForestHyper
    trees: list[Tree]

    def votes(self, X) -> np.ndarray:
        X = _as_matrix(X)
        if X.ndim == 1:
            X = X[None, :]
        K = len(self.class_names)
        votes = np.zeros((len(X), K), dtype=np.int64)
        for tree in self.trees:
            votes[np.arange(len(X)), tree.predict(X)] += 1
        return votes

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.votes(X), axis=1)


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X)
    if X.dtype == object or not np.issubdtype(X.dtype, np.integer):
        return X.astype(np.float64)
    return X.astype(np.int64, copy=False)


def gini(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        return 0.0
    frac = counts / total
    return float(1.0 - np.sum(frac * frac))


def _best_split(Xn: np.ndarray, yn: np.ndarray, feats: np.ndarray, K: int, min_leaf: int):
    """Best (feature, threshold, score) among ``feats``; score is the summed
    child impurity weighted by child size, or None when no split is valid."""
    n = len(yn)
    sub = Xn[:, feats]
    order = np.argsort(sub, axis=0, kind="stable")
    vals = np.take_along_axis(sub, order, axis=0)
    ys = yn[order]
    onehot = ys[None, :, :] == np.arange(K)[:, None, None]
    left = np.cumsum(onehot, axis=1)[:, :-1, :]  # (K, n-1, m): first i+1 rows go left
    total = left[:, -1:, :] + onehot[:, -1:, :]
    right = total - left
    n_left = np.arange(1, n)[:, None]
    n_right = n - n_left
    # size-weighted Gini: n_L - sum(c_L^2)/n_L + n_R - sum(c_R^2)/n_R
    score = n - (left * left).sum(axis=0) / n_left - (right * right).sum(axis=0) / n_right
    valid = (vals[:-1] < vals[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, np.inf)
    flat = int(np.argmin(score.T))  # feature-major, so ties favour earlier candidates
    j, i = divmod(flat, n - 1)
    lo, hi = vals[i, j], vals[i + 1, j]
    if np.issubdtype(vals.dtype, np.integer):
        thr = (int(lo) + int(hi)) // 2  # lo <= thr < hi
    else:
        thr = float(lo + (hi - lo) / 2)
    return int(feats[j]), thr, float(score[i, j])


def _grow_tree(X: np.ndarray, y: np.ndarray, K: int, hyper: ForestHyper, m: int, tree_index: int) -> Tree:
    seed = hyper.seed + tree_index
    rng = np.random.default_rng(seed)
    n, d = X.shape
    boot = rng.integers(0, n, size=n)
    feature, threshold, left, right, counts = [], [], [], [], []
    is_int = np.issubdtype(X.dtype, np.integer)

    def new_node(idx) -> int:
        feature.append(-1)
        threshold.append(0 if is_int else 0.0)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[idx], minlength=K))
        return len(feature) - 1

    stack = [(new_node(boot), boot, 0)]
    while stack:
        node, idx, depth = stack.pop()
        c = counts[node]
        if depth >= hyper.max_depth or len(idx) < 2 * hyper.min_leaf or np.count_nonzero(c) <= 1:
            continue
        feats = rng.choice(d, size=m, replace=False)
        found = _best_split(X[idx], y[idx], feats, K, hyper.min_leaf)
        if found is None:
            continue
        f, thr, score = found
        parent = len(idx) - float(np.sum(c.astype(np.float64) ** 2)) / len(idx)
        if score >= parent - 1e-12:
            continue
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    thr_dtype = np.int64 if is_int else np.float64
    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=thr_dtype),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64).reshape(-1, K),
        seed,
    )


def _grow_trees(tree_indices, X, y, K, hyper, m) -> list[Tree]:
    return [_grow_tree(X, y, K, hyper, m, t) for t in tree_indices]


def train_random_forest(train: LabeledDataset, hyper: ForestHyper = ForestHyper(), workers: int | None = None) -> ForestModel:
    if len(train) == 0:
        raise ValueError("cannot train a forest on an empty dataset")
    X = _as_matrix(train.X)
    y = np.asarray(train.y, dtype=np.int64)
    K = len(train.class_names)
    d = train.feature_dim
    m = hyper.max_features or ceil(sqrt(d))
    m = max(1, min(m, d))
    groups = [list(range(t, hyper.num_trees, max(1, min(hyper.num_trees, 64)))) for t in range(min(hyper.num_trees, 64))]
    grown = ordered_map(partial(_grow_trees, X=X, y=y, K=K, hyper=hyper, m=m), groups, workers)
    by_index = {}
    for idxs, trees in zip(groups, grown):
        by_index.update(zip(idxs, trees))
    trees = [by_index[t] for t in range(hyper.num_trees)]
    return ForestModel(list(train.class_names), d, m, hyper, trees)


def predict_forest(model: ForestModel, features) -> np.ndarray | int:
    arr = np.asarray(features)
    out = model.predict(arr)
    return int(out[0]) if arr.ndim == 1 else out
