"""Flat text serialisation of trained models.

Layout (UTF-8, LF):

    curveml-model 1
    type <naive_bayes|logistic|forest>
    <key>\t<comma-separated values>
    ...

Floats are written with ``repr`` so every value round-trips exactly. See
docs/formats.md for the per-model records.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from curveml.learn.forest import ForestHyper, ForestModel, Tree
from curveml.learn.logistic import LogisticModel
from curveml.learn.naive_bayes import NaiveBayesModel

MAGIC = "curveml-model"
VERSION = 1

Model = NaiveBayesModel | LogisticModel | ForestModel


def _num(x) -> str:
    if isinstance(x, (np.integer, int)):
        return str(int(x))
    return repr(float(x))


def _parse(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def _row(values) -> str:
    return ",".join(_num(v) for v in np.ravel(values))


def _floats(s: str) -> np.ndarray:
    return np.array([float(v) for v in s.split(",")], dtype=np.float64) if s else np.zeros(0)


def _names(names) -> str:
    for n in names:
        if "," in n or "\t" in n or "\n" in n:
            raise ValueError(f"class name {n!r} cannot be serialised")
    return ",".join(names)


def dumps(model: Model) -> str:
    lines = [f"{MAGIC} {VERSION}"]

    def rec(key, value):
        lines.append(f"{key}\t{value}")

    if isinstance(model, NaiveBayesModel):
        lines.append("type naive_bayes")
        rec("classes", _names(model.class_names))
        rec("dim", model.feature_dim)
        rec("likelihood", model.likelihood)
        rec("prior", _row(model.priors))
        if model.likelihood == "gaussian":
            rec("var_floor", _num(model.var_floor))
            for k in range(len(model.class_names)):
                rec(f"mean {k}", _row(model.means[k]))
                rec(f"var {k}", _row(model.variances[k]))
        else:
            rec("alpha", _num(model.alpha))
            for j, (vals, table) in enumerate(zip(model.values, model.log_probs)):
                rec(f"values {j}", _row(vals))
                for k in range(len(model.class_names)):
                    rec(f"logp {j} {k}", _row(table[k]))
    elif isinstance(model, LogisticModel):
        lines.append("type logistic")
        rec("classes", _names(model.class_names))
        rec("dim", len(model.mean))
        rec("iterations", model.iterations)
        rec("mean", _row(model.mean))
        rec("scale", _row(model.scale))
        rec("bias", _row(model.bias))
        for k, w in enumerate(model.weights):
            rec(f"weight {k}", _row(w))
    elif isinstance(model, ForestModel):
        h = model.hyper
        lines.append("type forest")
        rec("classes", _names(model.class_names))
        rec("dim", model.feature_dim)
        rec("max_features", model.max_features)
        rec("hyper", _row([h.num_trees, h.max_depth, h.min_leaf, h.seed, h.max_features or 0]))
        for t, tree in enumerate(model.trees):
            rec(f"tree {t}", _row([tree.seed, len(tree.feature), int(np.issubdtype(tree.threshold.dtype, np.integer))]))
            for i in range(len(tree.feature)):
                rec(
                    f"node {t} {i}",
                    ",".join(
                        [
                            str(int(tree.feature[i])),
                            _num(tree.threshold[i]),
                            str(int(tree.left[i])),
                            str(int(tree.right[i])),
                            _row(tree.counts[i]),
                        ]
                    ),
                )
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Model:
    lines = text.rstrip("\n").split("\n")
    head = lines[0].split()
    if len(head) != 2 or head[0] != MAGIC:
        raise ValueError("not a curveml model file")
    if int(head[1]) != VERSION:
        raise ValueError(f"unsupported model version {head[1]} (expected {VERSION})")
    kind = lines[1].split()[1]
    recs: dict[str, str] = {}
    order: list[str] = []
    for ln in lines[2:]:
        key, _, value = ln.partition("\t")
        recs[key] = value
        order.append(key)
    classes = recs["classes"].split(",")
    dim = int(recs["dim"])
    K = len(classes)

    if kind == "naive_bayes":
        model = NaiveBayesModel(classes, dim, recs["likelihood"], _floats(recs["prior"]))
        if model.likelihood == "gaussian":
            model.var_floor = float(recs["var_floor"])
            model.means = np.stack([_floats(recs[f"mean {k}"]) for k in range(K)])
            model.variances = np.stack([_floats(recs[f"var {k}"]) for k in range(K)])
        else:
            model.alpha = float(recs["alpha"])
            for j in range(dim):
                model.values.append(_floats(recs[f"values {j}"]))
                model.log_probs.append(np.stack([_floats(recs[f"logp {j} {k}"]) for k in range(K)]))
        return model
    if kind == "logistic":
        weights = []
        k = 0
        while f"weight {k}" in recs:
            weights.append(_floats(recs[f"weight {k}"]))
            k += 1
        return LogisticModel(
            classes,
            _floats(recs["mean"]),
            _floats(recs["scale"]),
            np.stack(weights),
            _floats(recs["bias"]),
            iterations=int(recs["iterations"]),
        )
    if kind == "forest":
        nt, depth, leaf, seed, mf = (int(v) for v in recs["hyper"].split(","))
        hyper = ForestHyper(nt, depth, leaf, seed, mf or None)
        trees = []
        for t in range(nt):
            tseed, nnodes, int_thr = (int(v) for v in recs[f"tree {t}"].split(","))
            feat, thr, left, right, counts = [], [], [], [], []
            for i in range(nnodes):
                parts = recs[f"node {t} {i}"].split(",")
                feat.append(int(parts[0]))
                thr.append(_parse(parts[1]))
                left.append(int(parts[2]))
                right.append(int(parts[3]))
                counts.append([int(c) for c in parts[4:]])
            trees.append(
                Tree(
                    np.array(feat, dtype=np.int64),
                    np.array(thr, dtype=np.int64 if int_thr else np.float64),
                    np.array(left, dtype=np.int64),
                    np.array(right, dtype=np.int64),
                    np.array(counts, dtype=np.int64).reshape(-1, K),
                    tseed,
                )
            )
        return ForestModel(classes, dim, int(recs["max_features"]), hyper, trees)
    raise ValueError(f"unknown model type {kind!r}")


def save_model(model: Model, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


def load_model(path) -> Model:
    return loads(Path(path).read_text(encoding="utf-8"))
