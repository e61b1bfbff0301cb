"""Run every catalog experiment that the supplied data can feed, with repeats,
and write one report per run plus a summary CSV.

    python scripts/run_catalog.py --data elliptic.csv --data genus2.csv \
        --cache vectors.txt --repeat 5 --out-dir results/
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from curveml.data_io import detect_family, read_curves
from curveml.experiments import ExperimentError, VectorStore, builtin_catalog, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", action="append", required=True)
    ap.add_argument("--cache")
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="experiment names to run (default: all applicable)")
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    curves = []
    for path in args.data:
        curves += read_curves(path, detect_family(path))
    families = {r.family for r in curves}
    store = VectorStore(args.cache, workers=args.workers)
    out = Path(args.out_dir)
    summary = ["experiment,classifier,runs,mean_precision,mean_mcc"]
    for cfg in builtin_catalog():
        if cfg.curve_family not in families or (args.only and cfg.name not in args.only):
            continue
        per_clf: dict[str, list[tuple[float, float]]] = {}
        for rep in range(args.repeat):
            try:
                report = run_experiment(cfg.with_seed(rep), curves, store, workers=args.workers)
            except ExperimentError as exc:
                print(f"{cfg.name}: {exc}", file=sys.stderr)
                break
            report.write(out, f"{cfg.name}.seed{rep}")
            for r in report.results:
                per_clf.setdefault(r.classifier, []).append((r.precision, r.mcc))
            store.save()
        for clf, vals in per_clf.items():
            p, m = np.mean(vals, axis=0)
            summary.append(f"{cfg.name},{clf},{len(vals)},{p:.4f},{m:.4f}")
            print(summary[-1])
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.csv").write_text("\n".join(summary) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
