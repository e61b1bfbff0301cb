"""Class balancing and stratified train/validation splits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from curveml.features import LabeledDataset


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.8
    seed: int = 0
    balance: bool = True

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


def balance_classes(ds: LabeledDataset, seed: int, per_class: int | None = None) -> LabeledDataset:
    """Downsample every class, without replacement, to the size of the smallest
    (or to ``per_class`` if that is smaller)."""
    if len(ds.class_names) < 2:
        raise ValueError("balancing needs at least two classes")
    counts = np.bincount(ds.y, minlength=len(ds.class_names))
    empty = [name for name, c in zip(ds.class_names, counts) if c == 0]
    if empty:
        raise ValueError(f"classes with no rows: {empty}")
    rng = np.random.default_rng(seed)
    size = int(counts.min())
    if per_class is not None:
        if per_class < 1:
            raise ValueError("per_class must be positive")
        size = min(size, per_class)
    keep = []
    for k in range(len(ds.class_names)):
        members = np.flatnonzero(ds.y == k)
        keep.append(rng.choice(members, size=size, replace=False))
    idx = np.concatenate(keep)
    return ds.subset(idx[rng.permutation(len(idx))])


def split(ds: LabeledDataset, cfg: SplitConfig) -> tuple[LabeledDataset, LabeledDataset]:
    """Stratified split: floor(train_fraction * n_k) rows of class k go to train."""
    if len(ds) == 0:
        raise ValueError("cannot split an empty dataset")
    rng = np.random.default_rng(cfg.seed)
    train_idx, val_idx = [], []
    for k, name in enumerate(ds.class_names):
        members = np.flatnonzero(ds.y == k)
        if len(members) < 2:
            raise ValueError(f"class {name!r} has {len(members)} rows; a split needs at least 2")
        members = members[rng.permutation(len(members))]
        n_train = min(max(int(np.floor(cfg.train_fraction * len(members))), 1), len(members) - 1)
        train_idx.append(members[:n_train])
        val_idx.append(members[n_train:])
    tr = np.concatenate(train_idx)
    va = np.concatenate(val_idx)
    return ds.subset(tr[rng.permutation(len(tr))]), ds.subset(va[rng.permutation(len(va))])


def as_float_matrix(X) -> np.ndarray:
    return np.asarray(X, dtype=np.float64)
