"""L2-regularised logistic (K = 2) and softmax (K > 2) regression, trained by
full-batch gradient descent on standardised features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp

from curveml.features import LabeledDataset
from curveml.learn.data import as_float_matrix


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class LogisticHyper:
    l2_lambda: float = 1e-4
    max_iters: int = 2000
    tolerance: float = 1e-6


@dataclass
class LogisticModel:
    class_names: list[str]
    mean: np.ndarray
    scale: np.ndarray
    weights: np.ndarray  # (1, d) for K = 2, (K, d) otherwise
    bias: np.ndarray
    iterations: int = 0

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def decision_function(self, X) -> np.ndarray:
        Xs = (as_float_matrix(X) - self.mean) / self.scale
        return Xs @ self.weights.T + self.bias

    def predict(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.ndim == 1:
            X = X[None, :]
        z = self.decision_function(X)
        if self.n_classes == 2:
            return (z[:, 0] > 0).astype(np.int64)  # z == 0 is a tie -> class 0
        return np.argmax(z, axis=1)


def loss_and_grad(W: np.ndarray, b: np.ndarray, Xs: np.ndarray, y: np.ndarray, K: int, l2_lambda: float):
    """Mean cross-entropy plus (l2_lambda / 2) * ||W||^2, and its gradient in (W, b).

    The bias is not penalised.
    """
    n = len(y)
    penalty = 0.5 * l2_lambda * float(np.sum(W * W))
    if K == 2:
        z = Xs @ W[0] + b[0]
        loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + penalty
        r = expit(z) - y
        gW = (r @ Xs)[None, :] / n + l2_lambda * W
        gb = np.array([r.mean()])
        return loss, gW, gb
    Z = Xs @ W.T + b
    lse = logsumexp(Z, axis=1)
    loss = float(np.mean(lse - Z[np.arange(n), y])) + penalty
    P = np.exp(Z - lse[:, None])
    P[np.arange(n), y] -= 1.0
    gW = P.T @ Xs / n + l2_lambda * W
    gb = P.mean(axis=0)
    return loss, gW, gb


def train_logistic(train: LabeledDataset, hyper: LogisticHyper = LogisticHyper()) -> LogisticModel:
    K = len(train.class_names)
    if K < 2:
        raise ValueError("logistic regression needs at least two classes")
    X = as_float_matrix(train.X)
    y = np.asarray(train.y)
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 1e-12, scale, 1.0)
    Xs = (X - mean) / scale
    rows = 1 if K == 2 else K
    W = np.zeros((rows, train.feature_dim))
    b = np.zeros(rows)
    step = 1.0
    loss, gW, gb = loss_and_grad(W, b, Xs, y, K, hyper.l2_lambda)
    it = 0
    for it in range(1, hyper.max_iters + 1):
        if not np.isfinite(loss):
            raise DivergenceError(f"non-finite loss at iteration {it}")
        gmax = max(float(np.abs(gW).max(initial=0.0)), float(np.abs(gb).max()))
        if gmax < hyper.tolerance:
            break
        gsq = float(np.sum(gW * gW) + np.sum(gb * gb))
        # the step only ever shrinks: halve until the Armijo condition holds
        while True:
            W_new = W - step * gW
            b_new = b - step * gb
            new_loss, nW, nb = loss_and_grad(W_new, b_new, Xs, y, K, hyper.l2_lambda)
            if not np.isfinite(new_loss):
                raise DivergenceError(f"non-finite loss at iteration {it}")
            # slack of a few ulps so the test still passes once decreases fall below rounding
            if new_loss <= loss - 0.5 * step * gsq + 4 * np.spacing(loss) or step < 1e-12:
                break
            step *= 0.5
        W, b, loss, gW, gb = W_new, b_new, new_loss, nW, nb
    return LogisticModel(list(train.class_names), mean, scale, W, b, iterations=it)


def predict_logistic(model: LogisticModel, features) -> np.ndarray | int:
    arr = np.asarray(features)
    out = model.predict(arr)
    return int(out[0]) if arr.ndim == 1 else out
