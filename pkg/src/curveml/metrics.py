"""Precision (validation accuracy), Matthews correlation, and count summaries."""

from __future__ import annotations

import io
from dataclasses import dataclass
from math import sqrt
from typing import Mapping, Sequence

import numpy as np


@dataclass
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    counts: np.ndarray
    class_names: list[str]

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        K = len(self.class_names)
        if self.counts.shape != (K, K):
            raise ValueError(f"confusion matrix must be {K}x{K}, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_predictions(cls, y_true, y_pred, class_names: Sequence[str]) -> "ConfusionMatrix":
        K = len(class_names)
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        counts = np.bincount(y_true * K + y_pred, minlength=K * K).reshape(K, K)
        return cls(counts, list(class_names))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("true\\predicted," + ",".join(self.class_names) + "\n")
        for name, row in zip(self.class_names, self.counts):
            buf.write(name + "," + ",".join(str(int(c)) for c in row) + "\n")
        return buf.getvalue()


def _require_nonempty(cm: ConfusionMatrix) -> None:
    if cm.total == 0:
        raise ValueError("empty confusion matrix")


def precision(cm: ConfusionMatrix) -> float:
    """Fraction of predictions that agree with the recorded label (trace / total)."""
    _require_nonempty(cm)
    return float(np.trace(cm.counts)) / cm.total


def mcc_binary(tp: int, tn: int, fp: int, fn: int) -> float:
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / sqrt(denom)


def mcc_multiclass(counts) -> float:
    """Gorodkin's K-class correlation coefficient; 0 when the denominator vanishes."""
    C = np.asarray(counts, dtype=np.float64)
    s = C.sum()
    c = np.trace(C)
    t = C.sum(axis=1)
    p = C.sum(axis=0)
    denom = (s * s - p @ p) * (s * s - t @ t)
    if denom == 0:
        return 0.0
    return float((c * s - p @ t) / np.sqrt(denom))


def mcc(cm: ConfusionMatrix) -> float:
    _require_nonempty(cm)
    if len(cm.class_names) == 2:
        (tn, fp), (fn, tp) = cm.counts.tolist()
        return mcc_binary(tp, tn, fp, fn)
    return mcc_multiclass(cm.counts)


@dataclass
class CountSummary:
    mean: float
    std: float
    histogram: dict[int, int]

    def to_csv_rows(self, group: str) -> list[str]:
        return [f"{group},{b},{c}" for b, c in self.histogram.items()]


def summarize_counts(values: Sequence[int]) -> CountSummary:
    """Mean, population standard deviation, and unit-width histogram over [min, max]."""
    arr = np.asarray(values, dtype=np.int64)
    if arr.size == 0:
        raise ValueError("cannot summarise an empty sequence")
    lo = int(arr.min())
    counts = np.bincount(arr - lo)
    hist = {lo + i: int(c) for i, c in enumerate(counts)}
    return CountSummary(float(arr.mean()), float(arr.std()), hist)


def histogram_csv(summaries: Mapping[str, CountSummary]) -> str:
    lines = ["group,bin,count"]
    for group, summary in summaries.items():
        lines.extend(summary.to_csv_rows(group))
    return "\n".join(lines) + "\n"


def render_kv(pairs: Mapping[str, object]) -> str:
    """One ``key = value`` line per entry, in the given order."""
    out = []
    for key, value in pairs.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        out.append(f"{key} = {value}")
    return "\n".join(out) + "\n"
