"""Euler-coefficient feature vectors and labeled datasets built from them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable, Iterator, Sequence

import numpy as np

from curveml._parallel import chunked, ordered_map
from curveml.curves import CurveRecord, EllipticCurveQ, Genus2CurveQ, ap_matrix_elliptic, euler_pair_genus2

VECTOR_KINDS = ("L_elliptic", "L_genus2", "binary", "ternary", "weierstrass")


def nth_primes(N: int, skip_two: bool = False) -> list[int]:
    """The first N primes, or p_2..p_{N+1} when ``skip_two``."""
    if N < 1:
        raise ValueError("N must be positive")
    want = N + 1 if skip_two else N
    limit = 16
    while True:
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for i in range(2, int(limit**0.5) + 1):
            if sieve[i]:
                sieve[i * i :: i] = False
        primes = np.flatnonzero(sieve)
        if len(primes) >= want:
            primes = [int(p) for p in primes[:want]]
            return primes[1:] if skip_two else primes
        limit *= 2


def expected_length(kind: str, N: int) -> int:
    if kind not in VECTOR_KINDS:
        raise ValueError(f"unknown vector kind {kind!r}")
    if kind == "weierstrass":
        return 5
    if kind == "L_genus2":
        return 2 * N
    return N


@dataclass(frozen=True, eq=False)
class EulerVector:
    curve_label: str
    kind: str
    N: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.dtype == object:
            # Weierstrass coefficients can exceed int64
            vals = np.array(vals, dtype=object)
        else:
            vals = vals.astype(np.int64, copy=False)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.N < 1:
            raise ValueError("N must be positive")
        n = expected_length(self.kind, self.N)
        if vals.shape != (n,):
            raise ValueError(f"{self.curve_label}: {self.kind} vector with N={self.N} needs length {n}, got {vals.shape}")
        if self.kind == "binary" and not np.isin(vals, (0, 1)).all():
            raise ValueError("binary vector entries must be 0 or 1")
        if self.kind == "ternary" and not np.isin(vals, (-1, 0, 1)).all():
            raise ValueError("ternary vector entries must be -1, 0 or 1")

    def __eq__(self, other):
        if not isinstance(other, EulerVector):
            return NotImplemented
        return (
            (self.curve_label, self.kind, self.N) == (other.curve_label, other.kind, other.N)
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    def __len__(self):
        return len(self.values)

    def truncate(self, N: int) -> "EulerVector":
        """Restrict to the first N primes."""
        if self.kind == "weierstrass":
            raise ValueError("weierstrass vectors are not indexed by primes")
        if N > self.N:
            raise ValueError(f"cannot truncate N={self.N} vector to N={N}")
        width = 2 * N if self.kind == "L_genus2" else N
        return EulerVector(self.curve_label, self.kind, N, self.values[:width])


def _elliptic_block(curves: list[EllipticCurveQ], primes: list[int]) -> np.ndarray:
    return ap_matrix_elliptic(curves, primes)


def euler_vectors_elliptic(
    curves: Sequence[EllipticCurveQ], N: int, workers: int | None = None, chunk: int = 512
) -> list[EulerVector]:
    primes = nth_primes(N)
    blocks = ordered_map(partial(_elliptic_block, primes=primes), chunked(list(curves), chunk), workers)
    out = []
    for block_curves, mat in zip(chunked(list(curves), chunk), blocks):
        out.extend(EulerVector(c.label, "L_elliptic", N, row) for c, row in zip(block_curves, mat))
    return out


def euler_vector_elliptic(curve: EllipticCurveQ, N: int) -> EulerVector:
    """(a_{p_1}, ..., a_{p_N}), bad primes and p = 2 included."""
    return euler_vectors_elliptic([curve], N, workers=1)[0]


def _genus2_values(curve: Genus2CurveQ, primes: list[int]) -> list[int]:
    vals: list[int] = []
    for p in primes:
        vals.extend(euler_pair_genus2(curve, p))
    return vals


def euler_vectors_genus2(curves: Sequence[Genus2CurveQ], N: int, workers: int | None = None) -> list[EulerVector]:
    primes = nth_primes(N, skip_two=True)
    rows = ordered_map(partial(_genus2_values, primes=primes), list(curves), workers)
    return [EulerVector(c.label, "L_genus2", N, row) for c, row in zip(curves, rows)]


def euler_vector_genus2(curve: Genus2CurveQ, N: int) -> EulerVector:
    """Interleaved (a1, a2) pairs at p = 3, 5, 7, ... (N primes, 2 skipped)."""
    return euler_vectors_genus2([curve], N, workers=1)[0]


def _require_kind(v: EulerVector, kind: str) -> None:
    if v.kind != kind:
        raise ValueError(f"expected a {kind} vector, got {v.kind}")


def binary_vector(v: EulerVector) -> EulerVector:
    """0 where a_p = 0, 1 elsewhere."""
    _require_kind(v, "L_elliptic")
    return EulerVector(v.curve_label, "binary", v.N, (v.values != 0).astype(np.int64))


def ternary_vector(v: EulerVector) -> EulerVector:
    _require_kind(v, "L_elliptic")
    return EulerVector(v.curve_label, "ternary", v.N, np.sign(v.values).astype(np.int64))


def weierstrass_vector(curve: EllipticCurveQ) -> EulerVector:
    # EllipticCurveQ already rejects out-of-range e1, e2, e3
    if not isinstance(curve, EllipticCurveQ):
        raise TypeError("weierstrass vectors need an elliptic curve")
    coeffs = list(curve.coefficients)
    vals = np.array(coeffs, dtype=object) if any(abs(c) >= 1 << 62 for c in coeffs) else np.array(coeffs)
    return EulerVector(curve.label, "weierstrass", 1, vals)


def zero_count(v: EulerVector) -> int:
    return int(np.count_nonzero(v.values == 0))


# --- labeled datasets -------------------------------------------------------


def _torsion_name(structure: Sequence[int], order: int) -> str:
    factors = [c for c in structure if c != 1] or ([order] if order != 1 else [])
    if not factors:
        return "C1"
    return "x".join(f"C{c}" for c in sorted(factors))


def _fmt_number(x) -> str:
    if isinstance(x, float) and x.is_integer():
        x = int(x)
    return str(x)


def _sha_order(rec: CurveRecord) -> str | None:
    sha = rec.labels.sha_analytic_order
    return None if sha is None else str(int(round(sha)))


def _sha_trivial(rec: CurveRecord) -> str | None:
    lab = rec.labels
    trivial = lab.sha_is_trivial
    if trivial is None and lab.sha_analytic_order is not None:
        trivial = round(lab.sha_analytic_order) == 1
    if trivial is None:
        return None
    return "trivial" if trivial else "nontrivial"


LABEL_SELECTORS: dict[str, Callable[[CurveRecord], str | None]] = {
    "rank": lambda r: str(r.labels.rank),
    "torsion_order": lambda r: str(r.labels.torsion_order),
    "torsion_structure": lambda r: _torsion_name(r.labels.torsion_structure, r.labels.torsion_order),
    "integral_points": lambda r: None if r.labels.num_integral_points is None else str(r.labels.num_integral_points),
    "rational_points": lambda r: None if r.labels.num_rational_points is None else str(r.labels.num_rational_points),
    "sha_order": _sha_order,
    "sha_trivial": _sha_trivial,
}


def select_label(record: CurveRecord, selector: str) -> str | None:
    try:
        fn = LABEL_SELECTORS[selector]
    except KeyError:
        raise ValueError(f"unknown label selector {selector!r}; choose from {sorted(LABEL_SELECTORS)}") from None
    return fn(record)


def sort_class_names(names) -> list[str]:
    """Ascending numeric order when every name is a number, else lexicographic."""
    names = sorted(set(names))
    try:
        return sorted(names, key=lambda s: (float(s), s))
    except ValueError:
        return names


@dataclass
class LabeledDataset:
    feature_dim: int
    class_names: list[str]
    X: np.ndarray
    y: np.ndarray
    curve_labels: list[str]

    def __post_init__(self):
        self.X = np.asarray(self.X)
        if self.X.size == 0:
            self.X = self.X.reshape(0, self.feature_dim)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[1] != self.feature_dim:
            raise ValueError(f"feature rows must have length {self.feature_dim}")
        if len(self.X) != len(self.y) or len(self.y) != len(self.curve_labels):
            raise ValueError("X, y and curve_labels must have equal length")
        if len(self.y) and (self.y.min() < 0 or self.y.max() >= len(self.class_names)):
            raise ValueError("class index out of range")

    def __len__(self):
        return len(self.y)

    @property
    def rows(self) -> Iterator[tuple[np.ndarray, int, str]]:
        return zip(self.X, self.y.tolist(), self.curve_labels)

    def class_counts(self) -> dict[str, int]:
        counts = np.bincount(self.y, minlength=len(self.class_names))
        return {name: int(c) for name, c in zip(self.class_names, counts)}

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(
            self.feature_dim, list(self.class_names), self.X[idx], self.y[idx], [self.curve_labels[i] for i in idx]
        )


def vectors_for(records: Sequence[CurveRecord], vector_kind: str, N: int, workers: int | None = None) -> list[EulerVector]:
    """Compute the requested vector kind for every record, in order."""
    if vector_kind == "weierstrass":
        return [weierstrass_vector(r.curve) for r in records]
    if vector_kind == "L_genus2":
        return euler_vectors_genus2([r.curve for r in records], N, workers)
    base = euler_vectors_elliptic([r.curve for r in records], N, workers)
    if vector_kind == "binary":
        return [binary_vector(v) for v in base]
    if vector_kind == "ternary":
        return [ternary_vector(v) for v in base]
    if vector_kind == "L_elliptic":
        return base
    raise ValueError(f"unknown vector kind {vector_kind!r}")


def build_dataset(
    records: Sequence[CurveRecord],
    label_selector: str,
    vector_kind: str,
    N: int,
    vectors: Sequence[EulerVector] | None = None,
    class_names: Sequence[str] | None = None,
    workers: int | None = None,
) -> LabeledDataset:
    """One row per record: its feature vector mapped to its class index.

    ``vectors`` may be supplied (e.g. from a cache) and must align with
    ``records``. ``class_names`` fixes the class order; by default it is the
    sorted set of labels present.
    """
    labels = []
    for r in records:
        lab = select_label(r, label_selector)
        if lab is None:
            raise ValueError(f"curve {r.label} has no {label_selector} label")
        labels.append(lab)
    if class_names is None:
        class_names = sort_class_names(labels)
    class_names = list(class_names)
    index = {name: i for i, name in enumerate(class_names)}
    missing = sorted(set(labels) - set(index))
    if missing:
        raise ValueError(f"labels {missing} are not among the classes {class_names}")
    if vectors is None:
        vectors = vectors_for(records, vector_kind, N, workers)
    if len(vectors) != len(records):
        raise ValueError("vectors and records differ in length")
    dim = expected_length(vector_kind, N)
    for r, v in zip(records, vectors):
        if v.curve_label != r.label or v.kind != vector_kind or len(v) != dim:
            raise ValueError(f"vector for {v.curve_label} does not match curve {r.label} ({vector_kind}, N={N})")
    if vectors and any(v.values.dtype == object for v in vectors):
        X = np.array([v.values for v in vectors], dtype=object)
    else:
        X = np.array([v.values for v in vectors], dtype=np.int64).reshape(len(vectors), dim)
    y = np.array([index[lab] for lab in labels], dtype=np.int64)
    return LabeledDataset(dim, class_names, X, y, [r.label for r in records])
