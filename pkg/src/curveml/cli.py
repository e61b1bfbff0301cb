"""Command-line entry point.

Exit codes: 0 success, 1 user error (bad flags, bad input, unknown experiment),
2 internal error. Reports go to stdout, diagnostics and timing to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from curveml._parallel import WORKERS_ENV, worker_count
from curveml.data_io import DataFormatError, cache_write, detect_family, read_curves
from curveml.experiments import (
    ExperimentConfig,
    ExperimentError,
    VectorStore,
    catalog_by_name,
    render_parity,
    run_experiment,
    synthetic_parity_experiment,
    zero_count_study,
)
from curveml.features import vectors_for
from curveml.learn.forest import ForestHyper
from curveml.learn.logistic import LogisticHyper
from curveml.metrics import histogram_csv, render_kv

SYNTHETIC = "synthetic-parity"


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UserError(message)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _load_curves(paths, family: str | None = None):
    curves = []
    for path in paths:
        if not Path(path).exists():
            raise UserError(f"no such file: {path}")
        fam = detect_family(path)
        if family is not None and fam != family:
            raise UserError(f"{path} follows the {fam} schema, but --family {family} was given")
        curves.extend(read_curves(path, fam))
    return curves


def load_config_file(path) -> ExperimentConfig:
    """Experiment config from JSON; keys mirror ExperimentConfig fields."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    for key in ("class_filter", "conductor_train_range", "conductor_validation_range", "classifiers"):
        if key in raw:
            raw[key] = tuple(str(v) if key == "class_filter" else v for v in raw[key])
    if "logistic" in raw:
        raw["logistic"] = LogisticHyper(**raw["logistic"])
    if "forest" in raw:
        raw["forest"] = ForestHyper(**raw["forest"])
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise UserError(f"{path}: {exc}") from None


def cmd_euler(args) -> int:
    start = time.perf_counter()
    records = _load_curves([args.input], args.family)
    kind = "L_elliptic" if args.family == "elliptic" else "L_genus2"
    vectors = vectors_for(records, kind, args.n, workers=args.workers)
    cache_write(args.out, vectors)
    print(f"curves = {len(records)}")
    print(f"vector_kind = {kind}")
    print(f"N = {args.n}")
    print(f"cache = {args.out}")
    _log(f"elapsed_seconds = {time.perf_counter() - start:.3f}")
    return 0


def _resolve_experiments(name: str, curves) -> list[ExperimentConfig | str]:
    catalog = catalog_by_name()
    if name == "all":
        families = {r.family for r in curves}
        return [SYNTHETIC] + [c for c in catalog.values() if c.curve_family in families]
    if name == SYNTHETIC:
        return [SYNTHETIC]
    if name in catalog:
        return [catalog[name]]
    if name.endswith(".json") and Path(name).exists():
        return [load_config_file(name)]
    valid = ", ".join([SYNTHETIC, "all", *catalog])
    raise UserError(f"unknown experiment {name!r}; valid names: {valid}")


def cmd_run(args) -> int:
    curves = _load_curves(args.data or [])
    store = VectorStore(args.cache, workers=args.workers)
    plan = _resolve_experiments(args.experiment, curves)
    for item in plan:
        totals: dict[str, list[tuple[float, float]]] = {}
        for rep in range(args.repeat):
            seed = args.seed + rep
            start = time.perf_counter()
            if item == SYNTHETIC:
                res = synthetic_parity_experiment(seed=seed, workers=args.workers)
                print(render_parity(res, 100, 5000, seed))
                totals.setdefault("nb", []).append((res["nb_accuracy"], float("nan")))
                totals.setdefault("forest", []).append((res["forest_accuracy"], float("nan")))
                continue
            if not curves:
                raise UserError(f"experiment {item.name} needs --data")
            report = run_experiment(item.with_seed(seed), curves, store, workers=args.workers)
            text = report.render()
            print(text)
            if args.out_dir:
                report.write(args.out_dir, f"{item.name}.seed{seed}")
            _log(f"{item.name} seed={seed} elapsed_seconds={time.perf_counter() - start:.3f}")
            for r in report.results:
                totals.setdefault(r.classifier, []).append((r.precision, r.mcc))
        if args.repeat > 1:
            name = item if item == SYNTHETIC else item.name
            agg: dict[str, object] = {"aggregate": name, "repetitions": args.repeat}
            for clf, vals in totals.items():
                arr = np.array(vals)
                agg[f"{clf}.mean_precision"] = float(arr[:, 0].mean())
                if not np.isnan(arr[:, 1]).all():
                    agg[f"{clf}.mean_mcc"] = float(arr[:, 1].mean())
            print(render_kv(agg))
    store.save()
    return 0


def cmd_zero_hist(args) -> int:
    curves = _load_curves([args.data], "elliptic")
    if not any(r.labels.num_integral_points is not None for r in curves):
        raise UserError(f"{args.data} has no num_integral_points labels")
    store = VectorStore(args.cache, workers=args.workers)
    summaries = zero_count_study(curves, args.n, store)
    Path(args.out).write_text(histogram_csv(summaries), encoding="utf-8")
    pairs: dict[str, object] = {"N": args.n}
    for key, s in summaries.items():
        pairs[f"integral_points_{key}.curves"] = sum(s.histogram.values())
        pairs[f"integral_points_{key}.mean"] = s.mean
        pairs[f"integral_points_{key}.std"] = s.std
    pairs["histogram_csv"] = args.out
    print(render_kv(pairs), end="")
    store.save()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curveml", description="Euler-coefficient features and classifiers for arithmetic curves.")
    parser.add_argument(
        "--workers", type=_positive, default=None, help=f"worker processes (default: ${WORKERS_ENV} or 1)"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("euler", help="compute Euler-coefficient vectors into a cache file")
    p.add_argument("--input", required=True)
    p.add_argument("--family", required=True, choices=["elliptic", "genus2"])
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; counting is deterministic")
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("run", help="run a catalog experiment, a JSON config, 'synthetic-parity' or 'all'")
    p.add_argument("--experiment", required=True)
    p.add_argument("--data", action="append", help="curve CSV (repeat for elliptic + genus-2 files)")
    p.add_argument("--cache")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=_positive, default=1)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("zero-hist", help="histograms of zero a_p counts by integral-point class")
    p.add_argument("--data", required=True)
    p.add_argument("--n", type=_positive, default=500)
    p.add_argument("--out", required=True)
    p.add_argument("--cache")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the study is deterministic")
    p.set_defaults(func=cmd_zero_hist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.workers = worker_count(args.workers)
        return args.func(args)
    except (UserError, DataFormatError, ExperimentError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
