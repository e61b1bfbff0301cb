"""CSV schemas for curve data and the Euler-vector cache format.

The byte-level layout of every file is documented in docs/formats.md.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from curveml.curves import CurveLabels, CurveRecord, EllipticCurveQ, Genus2CurveQ
from curveml.features import EulerVector, VECTOR_KINDS, expected_length

ELLIPTIC_COLUMNS = [
    "label", "e1", "e2", "e3", "e4", "e5", "conductor", "discriminant_abs",
    "rank", "torsion_order", "torsion_structure", "num_integral_points", "sha_analytic_order",
]  # fmt: skip
ELLIPTIC_REQUIRED = ["label", "e1", "e2", "e3", "e4", "e5", "conductor", "rank", "torsion_order"]

GENUS2_COLUMNS = (
    ["label"] + [f"f{i}" for i in range(7)] + [f"h{i}" for i in range(4)]
    + ["conductor", "discriminant_abs", "rank", "torsion_order", "num_rational_points", "sha_is_trivial"]
)  # fmt: skip
GENUS2_REQUIRED = GENUS2_COLUMNS[:16]

CACHE_HEADER = "# curveml-euler-cache v1"


class DataFormatError(ValueError):
    def __init__(self, path, line: int | None, column: str | None, message: str):
        self.path = str(path)
        self.line = line
        self.column = column
        where = f"{self.path}"
        if line is not None:
            where += f", line {line}"
        if column is not None:
            where += f", column {column!r}"
        super().__init__(f"{where}: {message}")


@dataclass
class _Row:
    path: str
    line: int
    data: dict

    def raw(self, col: str) -> str:
        return (self.data.get(col) or "").strip()

    def int(self, col: str) -> int:
        s = self.raw(col)
        if s == "":
            raise DataFormatError(self.path, self.line, col, "missing value")
        try:
            return int(s)
        except ValueError:
            raise DataFormatError(self.path, self.line, col, f"malformed integer {s!r}") from None

    def opt_int(self, col: str) -> int | None:
        return None if self.raw(col) == "" else self.int(col)

    def opt_number(self, col: str) -> int | float | None:
        s = self.raw(col)
        if s == "":
            return None
        try:
            return int(s)
        except ValueError:
            pass
        try:
            return float(s)
        except ValueError:
            raise DataFormatError(self.path, self.line, col, f"malformed number {s!r}") from None


def _open_rows(path, required: Sequence[str]):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataFormatError(path, 1, None, "missing header row")
        header = [h.strip() for h in reader.fieldnames]
        reader.fieldnames = header
        missing = [c for c in required if c not in header]
        if missing:
            raise DataFormatError(path, 1, missing[0], f"missing required column(s) {missing}")
        for row in reader:
            yield _Row(str(path), reader.line_num, row)


def _structure(row: _Row) -> list[int]:
    s = row.raw("torsion_structure")
    if not s:
        return []
    try:
        return [int(x) for x in s.split(";") if x.strip()]
    except ValueError:
        raise DataFormatError(row.path, row.line, "torsion_structure", f"malformed structure {s!r}") from None


def _labels_or_raise(row: _Row, **kw) -> CurveLabels:
    try:
        return CurveLabels(**kw)
    except ValueError as exc:
        raise DataFormatError(row.path, row.line, None, str(exc)) from None


def _elliptic_record(row: _Row) -> CurveRecord:
    e = {c: row.int(c) for c in ("e1", "e2", "e3", "e4", "e5")}
    for c, allowed in (("e1", (0, 1)), ("e2", (-1, 0, 1)), ("e3", (-1, 0, 1))):
        if e[c] not in allowed:
            raise DataFormatError(row.path, row.line, c, f"{c} out of range (got {e[c]}, allowed {allowed})")
    try:
        curve = EllipticCurveQ(
            row.raw("label"), conductor=row.int("conductor"), discriminant_abs=row.opt_int("discriminant_abs"), **e
        )
    except ValueError as exc:
        raise DataFormatError(row.path, row.line, None, str(exc)) from None
    labels = _labels_or_raise(
        row,
        rank=row.int("rank"),
        torsion_order=row.int("torsion_order"),
        torsion_structure=_structure(row),
        num_integral_points=row.opt_int("num_integral_points"),
        sha_analytic_order=row.opt_number("sha_analytic_order"),
    )
    try:
        return CurveRecord(curve, labels)
    except ValueError as exc:
        raise DataFormatError(row.path, row.line, None, str(exc)) from None


def _genus2_record(row: _Row) -> CurveRecord:
    trivial = row.opt_int("sha_is_trivial")
    if trivial not in (None, 0, 1):
        raise DataFormatError(row.path, row.line, "sha_is_trivial", f"expected 0 or 1, got {trivial}")
    if row.raw("discriminant_abs") == "":
        raise DataFormatError(row.path, row.line, "discriminant_abs", "missing value (needed to find bad primes)")
    try:
        curve = Genus2CurveQ(
            row.raw("label"),
            tuple(row.int(f"f{i}") for i in range(7)),
            tuple(row.int(f"h{i}") for i in range(4)),
            row.int("conductor"),
            row.int("discriminant_abs"),
        )
    except ValueError as exc:
        if isinstance(exc, DataFormatError):
            raise
        raise DataFormatError(row.path, row.line, None, str(exc)) from None
    labels = _labels_or_raise(
        row,
        rank=row.int("rank"),
        torsion_order=row.int("torsion_order"),
        num_rational_points=row.opt_int("num_rational_points"),
        sha_is_trivial=None if trivial is None else bool(trivial),
    )
    return CurveRecord(curve, labels)


def _read(path, required, build, errors: list | None) -> list[CurveRecord]:
    records = []
    for row in _open_rows(path, required):
        if not row.raw("label"):
            exc = DataFormatError(row.path, row.line, "label", "missing value")
        else:
            try:
                records.append(build(row))
                continue
            except DataFormatError as e:
                exc = e
        if errors is None:
            raise exc
        errors.append(exc)
    return records


def read_elliptic_csv(path, errors: list | None = None) -> list[CurveRecord]:
    """Parse the elliptic-curve schema.

    With ``errors=None`` the first bad row raises :class:`DataFormatError`;
    otherwise bad rows are appended to ``errors`` and skipped, so that
    ``len(records) + len(errors)`` equals the number of data rows.
    """
    return _read(path, ELLIPTIC_REQUIRED, _elliptic_record, errors)


def read_genus2_csv(path, errors: list | None = None) -> list[CurveRecord]:
    return _read(path, GENUS2_REQUIRED, _genus2_record, errors)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    return str(v)


def write_elliptic_csv(path, records: Sequence[CurveRecord]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ELLIPTIC_COLUMNS)
        for r in records:
            c, lab = r.curve, r.labels
            w.writerow(
                [c.label, c.e1, c.e2, c.e3, c.e4, c.e5, c.conductor, _fmt(c.discriminant_abs), lab.rank,
                 lab.torsion_order, ";".join(str(x) for x in lab.torsion_structure),
                 _fmt(lab.num_integral_points), _fmt(lab.sha_analytic_order)]
            )  # fmt: skip


def write_genus2_csv(path, records: Sequence[CurveRecord]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GENUS2_COLUMNS)
        for r in records:
            c, lab = r.curve, r.labels
            w.writerow(
                [c.label, *c.f_coeffs, *c.h_coeffs, c.conductor, c.discriminant_abs, lab.rank, lab.torsion_order,
                 _fmt(lab.num_rational_points), _fmt(lab.sha_is_trivial)]
            )  # fmt: skip


def read_curves(path, family: str, errors: list | None = None) -> list[CurveRecord]:
    if family == "elliptic":
        return read_elliptic_csv(path, errors)
    if family == "genus2":
        return read_genus2_csv(path, errors)
    raise ValueError(f"unknown curve family {family!r}")


def detect_family(path) -> str:
    """Guess the schema from the header row."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        header = {h.strip() for h in next(csv.reader(fh), [])}
    if {"e1", "e5"} <= header:
        return "elliptic"
    if {"f0", "h0"} <= header:
        return "genus2"
    raise DataFormatError(path, 1, None, "header matches neither the elliptic nor the genus-2 schema")


# --- Euler-vector cache ------------------------------------------------------


class CacheFormatError(ValueError):
    pass


def cache_dumps(vectors: Sequence[EulerVector]) -> str:
    lines = [CACHE_HEADER]
    for v in vectors:
        if "," in v.curve_label or "\n" in v.curve_label:
            raise ValueError(f"curve label {v.curve_label!r} cannot be cached")
        lines.append(",".join([v.kind, str(v.N), v.curve_label, *(str(int(x)) for x in v.values)]))
    return "\n".join(lines) + "\n"


def cache_write(path, vectors: Sequence[EulerVector]) -> None:
    Path(path).write_text(cache_dumps(vectors), encoding="utf-8")


def cache_read(path) -> list[EulerVector]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != CACHE_HEADER:
        found = lines[0] if lines else "<empty file>"
        raise CacheFormatError(f"{path}, line 1: expected header {CACHE_HEADER!r}, found {found!r}")
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) < 3:
            raise CacheFormatError(f"{path}, line {lineno}: truncated record")
        kind, n_raw, label = parts[0], parts[1], parts[2]
        if kind not in VECTOR_KINDS:
            raise CacheFormatError(f"{path}, line {lineno}: unknown vector kind {kind!r}")
        try:
            N = int(n_raw)
            values = [int(x) for x in parts[3:]]
        except ValueError:
            raise CacheFormatError(f"{path}, line {lineno}: malformed integer") from None
        want = expected_length(kind, N) if N >= 1 else -1
        if len(values) != want:
            raise CacheFormatError(f"{path}, line {lineno}: {kind} N={N} needs {want} entries, found {len(values)}")
        big = any(abs(x) >= 1 << 62 for x in values)
        out.append(EulerVector(label, kind, N, np.array(values, dtype=object if big else np.int64)))
    return out
