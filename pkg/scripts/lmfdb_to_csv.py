"""Convert LMFDB exports (JSON array or JSON lines) to the curveml CSV schemas.

    python scripts/lmfdb_to_csv.py elliptic ec_curvedata.jsonl elliptic.csv
    python scripts/lmfdb_to_csv.py genus2 g2c_curves.jsonl genus2.csv

Elliptic records need ``ainvs`` = [a1, a2, a3, a4, a6]; curveml stores them as
e1=a1, e2=a3, e3=a2, e4=a4, e5=a6. Only optimal curves are kept when the
export carries ``optimality`` (pass --all to keep every curve). Field names
for other LMFDB schema versions can be adjusted in the maps below.
"""

import argparse
import json
import sys
from pathlib import Path

from curveml.curves import CurveLabels, CurveRecord, EllipticCurveQ, Genus2CurveQ
from curveml.data_io import write_elliptic_csv, write_genus2_csv

ELLIPTIC_FIELDS = {
    "label": ("lmfdb_label", "label"),
    "ainvs": ("ainvs",),
    "conductor": ("conductor",),
    "absD": ("absD", "abs_disc"),
    "rank": ("rank", "analytic_rank"),
    "torsion": ("torsion", "torsion_order"),
    "torsion_structure": ("torsion_structure",),
    "num_int_pts": ("num_int_pts",),
    "sha": ("sha", "sha_an"),
    "optimality": ("optimality",),
}

GENUS2_FIELDS = {
    "label": ("label",),
    "eqn": ("eqn",),  # [[f0, ..., f6], [h0, ..., h3]], trailing zeros may be dropped
    "conductor": ("cond", "conductor"),
    "abs_disc": ("abs_disc",),
    "rank": ("analytic_rank", "rank", "mw_rank"),
    "torsion": ("torsion_order",),
    "num_rat_pts": ("num_rat_pts",),
    "sha": ("analytic_sha",),
}


def load_records(path):
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("["):
        return json.loads(text)
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def pick(raw, fields, key, default=None):
    for name in fields[key]:
        if raw.get(name) is not None:
            return raw[name]
    return default


def as_list(v):
    return json.loads(v) if isinstance(v, str) else list(v)


def elliptic_record(raw):
    a1, a2, a3, a4, a6 = (int(x) for x in as_list(pick(raw, ELLIPTIC_FIELDS, "ainvs")))
    label = str(pick(raw, ELLIPTIC_FIELDS, "label"))
    disc = pick(raw, ELLIPTIC_FIELDS, "absD")
    curve = EllipticCurveQ(label, a1, a3, a2, a4, a6, int(pick(raw, ELLIPTIC_FIELDS, "conductor")),
                           int(disc) if disc is not None else None)  # fmt: skip
    if curve.discriminant_abs is None:
        curve = EllipticCurveQ(label, a1, a3, a2, a4, a6, curve.conductor, abs(curve.discriminant()))
    structure = [int(c) for c in as_list(pick(raw, ELLIPTIC_FIELDS, "torsion_structure", []))]
    order = int(pick(raw, ELLIPTIC_FIELDS, "torsion", 1))
    nip = pick(raw, ELLIPTIC_FIELDS, "num_int_pts")
    sha = pick(raw, ELLIPTIC_FIELDS, "sha")
    labels = CurveLabels(int(pick(raw, ELLIPTIC_FIELDS, "rank")), order, structure,
                         None if nip is None else int(nip), sha_analytic_order=None if sha is None else float(sha))  # fmt: skip
    return CurveRecord(curve, labels)


def genus2_record(raw):
    f, h = as_list(pick(raw, GENUS2_FIELDS, "eqn"))
    f = [int(c) for c in f] + [0] * (7 - len(f))
    h = [int(c) for c in h] + [0] * (4 - len(h))
    curve = Genus2CurveQ(str(pick(raw, GENUS2_FIELDS, "label")), f, h, int(pick(raw, GENUS2_FIELDS, "conductor")),
                         int(pick(raw, GENUS2_FIELDS, "abs_disc")))  # fmt: skip
    nrp = pick(raw, GENUS2_FIELDS, "num_rat_pts")
    sha = pick(raw, GENUS2_FIELDS, "sha")
    labels = CurveLabels(int(pick(raw, GENUS2_FIELDS, "rank")), int(pick(raw, GENUS2_FIELDS, "torsion", 1)),
                         num_rational_points=None if nrp is None else int(nrp),
                         sha_is_trivial=None if sha is None else round(float(sha)) == 1)  # fmt: skip
    return CurveRecord(curve, labels)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family", choices=["elliptic", "genus2"])
    ap.add_argument("source")
    ap.add_argument("dest")
    ap.add_argument("--all", action="store_true", help="keep non-optimal elliptic curves")
    args = ap.parse_args(argv)

    out, failed = [], 0
    for raw in load_records(args.source):
        if args.family == "elliptic" and not args.all and raw.get("optimality") not in (None, 1):
            continue
        try:
            out.append(elliptic_record(raw) if args.family == "elliptic" else genus2_record(raw))
        except (KeyError, TypeError, ValueError) as exc:
            failed += 1
            print(f"skipped {raw.get('label')}: {exc}", file=sys.stderr)
    (write_elliptic_csv if args.family == "elliptic" else write_genus2_csv)(args.dest, out)
    print(f"wrote {len(out)} curves to {args.dest} ({failed} skipped)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
