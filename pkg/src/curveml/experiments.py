"""Configuration-driven classification experiments over curve datasets.

An experiment filters curves by family, conductor range and label, turns them
into feature vectors, balances the classes, splits into training and
validation sets (or trains on one conductor range and validates on another),
trains one or more classifiers and reports precision and Matthews correlation.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from curveml.curves import CurveRecord
from curveml.data_io import cache_read, cache_write
from curveml.features import (
    LABEL_SELECTORS,
    EulerVector,
    LabeledDataset,
    binary_vector,
    build_dataset,
    euler_vectors_elliptic,
    euler_vectors_genus2,
    select_label,
    sort_class_names,
    ternary_vector,
    weierstrass_vector,
    zero_count,
)
from curveml.learn.data import SplitConfig, balance_classes, split
from curveml.learn.forest import ForestHyper, train_random_forest
from curveml.learn.logistic import LogisticHyper, train_logistic
from curveml.learn.naive_bayes import train_naive_bayes
from curveml.metrics import ConfusionMatrix, CountSummary, mcc, precision, render_kv, summarize_counts

CLASSIFIERS = ("nb", "logistic", "forest")
FAMILY_KINDS = {"elliptic": ("L_elliptic", "binary", "ternary", "weierstrass"), "genus2": ("L_genus2",)}


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    curve_family: str
    label_selector: str
    class_filter: tuple[str, ...]
    vector_kind: str
    N: int
    conductor_train_range: tuple[int, int]
    conductor_validation_range: tuple[int, int]
    classifiers: tuple[str, ...]
    seed: int = 0
    train_fraction: float = 0.8
    balance: bool = True
    target_per_class: int | None = None  # cap on curves per class after balancing
    nb_likelihood: str = "categorical"
    logistic: LogisticHyper = field(default_factory=LogisticHyper)
    forest: ForestHyper = field(default_factory=ForestHyper)
    description: str = ""

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.curve_family not in FAMILY_KINDS:
            raise ExperimentError(f"{self.name}: unknown curve family {self.curve_family!r}")
        if self.vector_kind not in FAMILY_KINDS[self.curve_family]:
            raise ExperimentError(f"{self.name}: vector kind {self.vector_kind} does not apply to {self.curve_family}")
        if self.label_selector not in LABEL_SELECTORS:
            raise ExperimentError(f"{self.name}: unknown label selector {self.label_selector!r}")
        if len(set(self.class_filter)) < 2:
            raise ExperimentError(f"{self.name}: need at least two classes")
        for lo, hi in (self.conductor_train_range, self.conductor_validation_range):
            if not 1 <= lo <= hi:
                raise ExperimentError(f"{self.name}: conductor range [{lo}, {hi}] is empty")
        if not self.classifiers or any(c not in CLASSIFIERS for c in self.classifiers):
            raise ExperimentError(f"{self.name}: classifiers must come from {CLASSIFIERS}")
        if self.N < 1:
            raise ExperimentError(f"{self.name}: N must be positive")
        if self.target_per_class is not None and self.target_per_class < 1:
            raise ExperimentError(f"{self.name}: target_per_class must be positive")
        SplitConfig(self.train_fraction, self.seed, self.balance)

    @property
    def extrapolates(self) -> bool:
        return self.conductor_train_range != self.conductor_validation_range

    @property
    def class_names(self) -> list[str]:
        return sort_class_names(self.class_filter)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed, forest=replace(self.forest, seed=seed))


@dataclass
class ClassifierResult:
    classifier: str
    confusion: ConfusionMatrix

    @property
    def precision(self) -> float:
        return precision(self.confusion)

    @property
    def mcc(self) -> float:
        return mcc(self.confusion)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    train_sizes: dict[str, int]
    validation_sizes: dict[str, int]
    results: list[ClassifierResult]
    seconds: float = 0.0
    skipped_unlabeled: int = 0

    @property
    def precision(self) -> float:
        return self.results[0].precision

    @property
    def mcc(self) -> float:
        return self.results[0].mcc

    def result(self, classifier: str) -> ClassifierResult:
        for r in self.results:
            if r.classifier == classifier:
                return r
        raise KeyError(classifier)

    def render(self) -> str:
        """Key/value text. Wall-clock time is left out so reruns compare byte for byte."""
        cfg = self.config
        pairs: dict[str, object] = {
            "experiment": cfg.name,
            "family": cfg.curve_family,
            "label": cfg.label_selector,
            "classes": ",".join(cfg.class_names),
            "vector_kind": cfg.vector_kind,
            "N": cfg.N,
            "conductor_train_range": f"[{cfg.conductor_train_range[0]},{cfg.conductor_train_range[1]}]",
            "conductor_validation_range": f"[{cfg.conductor_validation_range[0]},{cfg.conductor_validation_range[1]}]",
            "seed": cfg.seed,
            "train_fraction": cfg.train_fraction,
            "balance": cfg.balance,
            "target_per_class": cfg.target_per_class if cfg.target_per_class is not None else "",
            "skipped_unlabeled": self.skipped_unlabeled,
            "train_sizes": ",".join(f"{k}:{v}" for k, v in self.train_sizes.items()),
            "validation_sizes": ",".join(f"{k}:{v}" for k, v in self.validation_sizes.items()),
        }
        for r in self.results:
            pairs[f"{r.classifier}.precision"] = r.precision
            pairs[f"{r.classifier}.mcc"] = r.mcc
            pairs[f"{r.classifier}.confusion"] = ";".join(",".join(str(int(c)) for c in row) for row in r.confusion.counts)
        return render_kv(pairs)

    def write(self, directory, stem: str | None = None) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        stem = stem or self.config.name
        paths = [directory / f"{stem}.report.txt"]
        paths[0].write_text(self.render(), encoding="utf-8")
        for r in self.results:
            p = directory / f"{stem}.{r.classifier}.confusion.csv"
            p.write_text(r.confusion.to_csv(), encoding="utf-8")
            paths.append(p)
        return paths


class VectorStore:
    """Euler vectors keyed by curve label, computed once and optionally persisted.

    Only the base kinds are stored (L_elliptic, L_genus2, weierstrass); binary
    and ternary vectors and shorter prefixes are derived on request.
    """

    def __init__(self, path=None, workers: int | None = None):
        self.path = Path(path) if path else None
        self.workers = workers
        self._vectors: dict[tuple[str, str], EulerVector] = {}
        self.dirty = False
        if self.path and self.path.exists():
            for v in cache_read(self.path):
                self._put(v)

    def _put(self, v: EulerVector) -> None:
        key = (v.kind, v.curve_label)
        old = self._vectors.get(key)
        if old is None or old.N < v.N:
            self._vectors[key] = v

    def __len__(self):
        return len(self._vectors)

    def get(self, records: Sequence[CurveRecord], kind: str, N: int) -> list[EulerVector]:
        base = "L_elliptic" if kind in ("binary", "ternary") else kind
        missing = [r for r in records if not self._has(base, r.label, N)]
        if missing:
            if base == "L_elliptic":
                fresh = euler_vectors_elliptic([r.curve for r in missing], N, self.workers)
            elif base == "L_genus2":
                fresh = euler_vectors_genus2([r.curve for r in missing], N, self.workers)
            else:
                fresh = [weierstrass_vector(r.curve) for r in missing]
            for v in fresh:
                self._put(v)
            self.dirty = True
        out = []
        for r in records:
            v = self._vectors[(base, r.label)]
            if base != "weierstrass" and v.N != N:
                v = v.truncate(N)
            if kind == "binary":
                v = binary_vector(v)
            elif kind == "ternary":
                v = ternary_vector(v)
            out.append(v)
        return out

    def _has(self, base: str, label: str, N: int) -> bool:
        v = self._vectors.get((base, label))
        return v is not None and (base == "weierstrass" or v.N >= N)

    def save(self) -> None:
        if self.path and self.dirty:
            vectors = [self._vectors[k] for k in sorted(self._vectors)]
            cache_write(self.path, vectors)
            self.dirty = False


def _in_range(rec: CurveRecord, rng: tuple[int, int]) -> bool:
    return rng[0] <= rec.curve.conductor <= rng[1]


def _labeled_pool(cfg: ExperimentConfig, curves: Iterable[CurveRecord]) -> tuple[list[CurveRecord], int]:
    allowed = set(cfg.class_filter)
    pool, skipped = [], 0
    for rec in curves:
        if rec.family != cfg.curve_family:
            continue
        lab = select_label(rec, cfg.label_selector)
        if lab is None:
            skipped += 1
        elif lab in allowed:
            pool.append(rec)
    return pool, skipped


def _dataset(cfg: ExperimentConfig, records: list[CurveRecord], store: VectorStore) -> LabeledDataset:
    vectors = store.get(records, cfg.vector_kind, cfg.N)
    return build_dataset(records, cfg.label_selector, cfg.vector_kind, cfg.N, vectors=vectors, class_names=cfg.class_names)


def _check_classes(ds: LabeledDataset, what: str, name: str) -> None:
    counts = ds.class_counts()
    empty = [k for k, v in counts.items() if v == 0]
    if len(ds) == 0:
        raise ExperimentError(f"{name}: {what} set is empty")
    if empty:
        raise ExperimentError(f"{name}: {what} set has no curves of class(es) {empty} (sizes {counts})")


def _train_and_eval(cfg: ExperimentConfig, classifier: str, train: LabeledDataset, val: LabeledDataset, workers):
    if classifier == "nb":
        model = train_naive_bayes(train, likelihood=cfg.nb_likelihood)
    elif classifier == "logistic":
        model = train_logistic(train, cfg.logistic)
    else:
        model = train_random_forest(train, cfg.forest, workers=workers)
    pred = model.predict(val.X)
    return ClassifierResult(classifier, ConfusionMatrix.from_predictions(val.y, pred, val.class_names))


def prepare_datasets(
    cfg: ExperimentConfig, curves: Sequence[CurveRecord], store: VectorStore | None = None
) -> tuple[LabeledDataset, LabeledDataset, int]:
    """Training and validation datasets for ``cfg``, plus the count of curves
    skipped for lacking the label."""
    store = VectorStore() if store is None else store
    pool, skipped = _labeled_pool(cfg, curves)
    if not cfg.extrapolates:
        recs = [r for r in pool if _in_range(r, cfg.conductor_train_range)]
        ds = _dataset(cfg, recs, store)
        _check_classes(ds, "filtered", cfg.name)
        if cfg.balance:
            ds = balance_classes(ds, cfg.seed, cfg.target_per_class)
        train, val = split(ds, SplitConfig(cfg.train_fraction, cfg.seed, cfg.balance))
    else:
        tr_recs = [r for r in pool if _in_range(r, cfg.conductor_train_range)]
        taken = {r.label for r in tr_recs}
        va_recs = [r for r in pool if _in_range(r, cfg.conductor_validation_range) and r.label not in taken]
        train = _dataset(cfg, tr_recs, store)
        val = _dataset(cfg, va_recs, store)
        _check_classes(train, "training", cfg.name)
        _check_classes(val, "validation", cfg.name)
        if cfg.balance:
            train = balance_classes(train, cfg.seed, cfg.target_per_class)
            val = balance_classes(val, cfg.seed + 1, cfg.target_per_class)
    return train, val, skipped


def run_experiment(
    cfg: ExperimentConfig,
    curves: Sequence[CurveRecord],
    store: VectorStore | None = None,
    workers: int | None = None,
) -> ExperimentReport:
    start = time.perf_counter()
    store = VectorStore(workers=workers) if store is None else store
    train, val, skipped = prepare_datasets(cfg, curves, store)
    overlap = set(train.curve_labels) & set(val.curve_labels)
    if overlap:
        raise ExperimentError(f"{cfg.name}: curves in both training and validation: {sorted(overlap)[:5]}")
    results = [_train_and_eval(cfg, c, train, val, workers) for c in cfg.classifiers]
    return ExperimentReport(
        cfg, train.class_counts(), val.class_counts(), results, time.perf_counter() - start, skipped
    )


# --- synthetic and descriptive studies ---------------------------------------


def synthetic_parity_dataset(dim: int, count_per_class: int, seed: int) -> LabeledDataset:
    """Class "mixed": uniform integers in [-10, 10]; class "even": twice uniform integers in [-5, 5]."""
    rng = np.random.default_rng(seed)
    mixed = rng.integers(-10, 11, size=(count_per_class, dim))
    even = 2 * rng.integers(-5, 6, size=(count_per_class, dim))
    X = np.vstack([mixed, even])
    y = np.repeat([0, 1], count_per_class)
    labels = [f"mixed-{i}" for i in range(count_per_class)] + [f"even-{i}" for i in range(count_per_class)]
    return LabeledDataset(dim, ["mixed", "even"], X, y, labels)


def synthetic_parity_experiment(
    dim: int = 100,
    count_per_class: int = 5000,
    seed: int = 0,
    workers: int | None = None,
    forest: ForestHyper | None = None,
) -> dict[str, float]:
    """Validation accuracies of naive Bayes and a random forest at telling
    all-even integer vectors from mixed-parity ones (80/20 split)."""
    if count_per_class < 100:
        raise ValueError("count_per_class must be at least 100")
    ds = balance_classes(synthetic_parity_dataset(dim, count_per_class, seed), seed)
    train, val = split(ds, SplitConfig(0.8, seed))
    nb = train_naive_bayes(train)
    gnb = train_naive_bayes(train, likelihood="gaussian")
    rf = train_random_forest(train, forest or ForestHyper(seed=seed), workers=workers)
    acc = lambda model: float(np.mean(model.predict(val.X) == val.y))  # noqa: E731
    return {"nb_accuracy": acc(nb), "gaussian_nb_accuracy": acc(gnb), "forest_accuracy": acc(rf)}


def render_parity(result: dict[str, float], dim: int, count_per_class: int, seed: int) -> str:
    return render_kv(
        {"experiment": "synthetic-parity", "dim": dim, "count_per_class": count_per_class, "seed": seed, **result}
    )


def zero_count_study(
    curves: Sequence[CurveRecord], N: int = 500, store: VectorStore | None = None
) -> dict[str, CountSummary]:
    """Zero counts of the first N a_p, summarised separately for curves with no
    integral point ("0") and a single integral point ("1")."""
    store = VectorStore() if store is None else store
    groups: dict[str, list[CurveRecord]] = {"0": [], "1": []}
    for rec in curves:
        if rec.family != "elliptic":
            continue
        n = rec.labels.num_integral_points
        if n in (0, 1):
            groups[str(n)].append(rec)
    out = {}
    for key, recs in groups.items():
        if not recs:
            raise ExperimentError(f"no elliptic curves with {key} integral point(s)")
        out[key] = summarize_counts([zero_count(v) for v in store.get(recs, "L_elliptic", N)])
    return out


def coefficient_sweep(
    cfg: ExperimentConfig, curves: Sequence[CurveRecord], ns: Iterable[int] = range(1, 21), store: VectorStore | None = None
) -> list[tuple[int, float]]:
    """Precision of the first configured classifier as a function of N."""
    store = VectorStore() if store is None else store
    ns = list(ns)
    store.get(_labeled_pool(cfg, curves)[0], cfg.vector_kind, max(ns))
    return [(n, run_experiment(replace(cfg, N=n), curves, store).precision) for n in ns]


# --- catalog -----------------------------------------------------------------

_ALL = ("nb", "logistic", "forest")
_G2 = (1, 10**6)


def builtin_catalog() -> list[ExperimentConfig]:
    def ec(name, label, classes, N, rng, clf, target, kind="L_elliptic", val=None, desc=""):
        return ExperimentConfig(name, "elliptic", label, classes, kind, N, rng, val or rng, clf, target_per_class=target,
                                description=desc)  # fmt: skip

    def g2(name, label, classes, clf, target, desc=""):
        return ExperimentConfig(name, "genus2", label, classes, "L_genus2", 200, _G2, _G2, clf, target_per_class=target,
                                description=desc)  # fmt: skip

    rank = ("0", "1")
    return [
        ec("T1a", "rank", rank, 100, (1, 10**4), ("logistic",), 16000, desc="elliptic rank 0 vs 1"),
        ec("T1b", "rank", rank, 300, (1, 10**4), ("logistic",), 16000, desc="elliptic rank 0 vs 1"),
        ec("T1c", "rank", rank, 300, (20001, 30000), ("logistic",), 17000, desc="elliptic rank 0 vs 1"),
        ec("T1d", "rank", rank, 500, (20001, 30000), ("logistic",), 17000, desc="elliptic rank 0 vs 1"),
        ec("T1e", "rank", rank, 300, (1, 10**4), ("logistic",), 17000, val=(20001, 30000),
           desc="elliptic rank 0 vs 1, trained on small conductors, validated on larger ones"),  # fmt: skip
        ec("T2", "torsion_order", ("1", "2"), 500, (1, 3 * 10**4), ("nb",), 37500, desc="elliptic torsion order 1 vs 2"),
        ec("T3", "torsion_structure", ("C4", "C2xC2"), 500, (1, 10**6), ("forest",), 5400,
           desc="elliptic torsion C4 vs C2xC2"),  # fmt: skip
        ec("T4", "integral_points", ("0", "1"), 500, (1, 5 * 10**4), ("nb",), 32000,
           desc="elliptic curves with no integral point vs a single one"),  # fmt: skip
        ec("T5", "sha_order", ("4", "9"), 500, (1, 10**6), _ALL, 28000, desc="elliptic Sha order 4 vs 9 (weak)"),
        ec("W5", "sha_order", ("4", "9"), 1, (1, 10**6), _ALL, 28000, kind="weierstrass",
           desc="elliptic Sha order 4 vs 9 from Weierstrass coefficients (weak)"),  # fmt: skip
        ec("B4", "integral_points", ("0", "1"), 500, (1, 5 * 10**4), ("nb",), 32000, kind="binary",
           desc="integral points from zero/nonzero pattern of a_p"),  # fmt: skip
        ec("Te4", "integral_points", ("0", "1"), 500, (1, 5 * 10**4), ("nb",), 32000, kind="ternary",
           desc="integral points from signs of a_p"),  # fmt: skip
        g2("T6", "rank", ("0", "1", "2"), ("logistic",), 12100, desc="genus-2 rank 0 vs 1 vs 2"),
        g2("T7", "torsion_order", ("1", "2"), ("nb",), 14600, desc="genus-2 torsion order 1 vs 2"),
        g2("T8a", "rational_points", tuple(str(i) for i in range(7)), _ALL, 5000,
           desc="genus-2 number of rational points, 7 classes (weak)"),  # fmt: skip
        g2("T8b", "rational_points", ("2", "4"), _ALL, 9400, desc="genus-2 rational points 2 vs 4 (weak)"),
        g2("T9", "sha_trivial", ("nontrivial", "trivial"), ("logistic",), 42000, desc="genus-2 trivial Sha or not"),
    ]


def catalog_by_name() -> dict[str, ExperimentConfig]:
    return {cfg.name: cfg for cfg in builtin_catalog()}


def config_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)
