"""Naive Bayes with either per-value (categorical) or Gaussian feature likelihoods.

Euler coefficients are small integers, and their parity pattern is what
separates e.g. torsion order 1 from 2. A Gaussian likelihood only sees the
first two moments of each coordinate and cannot resolve that, so the
categorical likelihood is the default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from curveml.features import LabeledDataset
from curveml.learn.data import as_float_matrix

LIKELIHOODS = ("categorical", "gaussian")


@dataclass
class NaiveBayesModel:
    class_names: list[str]
    feature_dim: int
    likelihood: str
    priors: np.ndarray
    # gaussian
    means: np.ndarray | None = None
    variances: np.ndarray | None = None
    var_floor: float = 0.0
    # categorical: per feature, sorted seen values and a (K, V+1) log-probability
    # table whose last column is the unseen-value bucket
    alpha: float = 1.0
    values: list[np.ndarray] = field(default_factory=list)
    log_probs: list[np.ndarray] = field(default_factory=list)

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.feature_dim:
            raise ValueError(f"expected {self.feature_dim} features, got {X.shape[1]}")
        jll = np.tile(np.log(self.priors), (len(X), 1))
        if self.likelihood == "gaussian":
            for k in range(len(self.class_names)):
                var = self.variances[k]
                jll[:, k] += -0.5 * np.sum(np.log(2 * np.pi * var)) - 0.5 * np.sum((X - self.means[k]) ** 2 / var, axis=1)
            return jll
        for j in range(self.feature_dim):
            seen = self.values[j]
            col = X[:, j]
            pos = np.searchsorted(seen, col)
            pos_c = np.minimum(pos, len(seen) - 1)
            hit = seen[pos_c] == col
            bucket = np.where(hit, pos_c, len(seen))
            jll += self.log_probs[j][:, bucket].T
        return jll

    def predict(self, X) -> np.ndarray:
        # argmax returns the first maximum: ties go to the lowest class index
        return np.argmax(self.joint_log_likelihood(X), axis=1)


def train_naive_bayes(train: LabeledDataset, likelihood: str = "categorical", alpha: float = 1.0) -> NaiveBayesModel:
    if likelihood not in LIKELIHOODS:
        raise ValueError(f"likelihood must be one of {LIKELIHOODS}")
    K = len(train.class_names)
    counts = np.bincount(train.y, minlength=K)
    if (counts == 0).any():
        missing = [n for n, c in zip(train.class_names, counts) if c == 0]
        raise ValueError(f"classes absent from training data: {missing}")
    X = as_float_matrix(train.X)
    priors = counts / counts.sum()
    model = NaiveBayesModel(list(train.class_names), train.feature_dim, likelihood, priors)
    if likelihood == "gaussian":
        means = np.stack([X[train.y == k].mean(axis=0) for k in range(K)])
        variances = np.stack([X[train.y == k].var(axis=0) for k in range(K)])
        max_var = float(variances.max()) if variances.size else 0.0
        model.var_floor = 1e-9 * (max_var if max_var > 0 else 1.0)
        model.means = means
        model.variances = np.maximum(variances, model.var_floor)
        return model
    model.alpha = alpha
    for j in range(train.feature_dim):
        seen, inverse = np.unique(X[:, j], return_inverse=True)
        table = np.zeros((K, len(seen) + 1))
        np.add.at(table, (train.y, inverse), 1)
        table += alpha
        table /= (counts + alpha * (len(seen) + 1))[:, None]
        model.values.append(seen)
        model.log_probs.append(np.log(table))
    return model


def train_gaussian_nb(train: LabeledDataset) -> NaiveBayesModel:
    return train_naive_bayes(train, likelihood="gaussian")


def predict_nb(model: NaiveBayesModel, features) -> np.ndarray | int:
    """Class index for one feature vector, or an array of indices for a matrix."""
    arr = np.asarray(features)
    out = model.predict(arr)
    return int(out[0]) if arr.ndim == 1 else out
