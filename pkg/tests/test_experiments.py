from dataclasses import replace

import numpy as np
import pytest

from curveml.curves import CurveLabels, CurveRecord, EllipticCurveQ
from curveml.data_io import CACHE_HEADER, cache_read
from curveml.experiments import (
    ExperimentConfig,
    ExperimentError,
    VectorStore,
    builtin_catalog,
    catalog_by_name,
    coefficient_sweep,
    prepare_datasets,
    run_experiment,
    synthetic_parity_dataset,
    synthetic_parity_experiment,
    zero_count_study,
)
from curveml.features import euler_vector_elliptic
from curveml.learn import ForestHyper
from synthetic import parity_records


@pytest.fixture(scope="module")
def records():
    return parity_records(150, seed=1)


def torsion_cfg(**kw):
    base = dict(name="mini-T2", curve_family="elliptic", label_selector="torsion_order", class_filter=("1", "2"),
                vector_kind="L_elliptic", N=60, conductor_train_range=(1, 40000),
                conductor_validation_range=(1, 40000), classifiers=("nb", "logistic", "forest"),
                forest=ForestHyper(num_trees=15))  # fmt: skip
    base.update(kw)
    return ExperimentConfig(**base)


def test_catalog_shape():
    cat = builtin_catalog()
    names = [c.name for c in cat]
    assert len(names) == len(set(names)) == 17
    by = catalog_by_name()
    assert by["T1e"].extrapolates and not by["T1a"].extrapolates
    assert by["T1e"].conductor_validation_range == (20001, 30000)
    assert by["T3"].class_names == ["C2xC2", "C4"]
    assert by["T6"].class_names == ["0", "1", "2"] and by["T6"].N == 200 and by["T6"].curve_family == "genus2"
    assert by["T8a"].class_names == [str(i) for i in range(7)]
    assert by["W5"].vector_kind == "weierstrass"
    assert {by["B4"].vector_kind, by["Te4"].vector_kind} == {"binary", "ternary"}
    assert set(by["T5"].classifiers) == {"nb", "logistic", "forest"}
    assert all(c.N in (1, 100, 200, 300, 500) for c in cat)


@pytest.mark.parametrize(
    "change",
    [dict(class_filter=("1",)), dict(conductor_train_range=(10, 5)), dict(classifiers=("svm",)),
     dict(vector_kind="L_genus2"), dict(curve_family="genus3"), dict(N=0), dict(label_selector="height"),
     dict(train_fraction=1.5), dict(target_per_class=0)],
)  # fmt: skip
def test_config_validation(change):
    with pytest.raises((ExperimentError, ValueError)):
        torsion_cfg(**change)


def test_run_experiment_learns_parity(records):
    rep = run_experiment(torsion_cfg(), records)
    assert rep.result("nb").precision >= 0.9
    assert rep.train_sizes == {"1": 120, "2": 120} and rep.validation_sizes == {"1": 30, "2": 30}
    for r in rep.results:
        assert r.confusion.total == 60
        assert -1 <= r.mcc <= 1
    text = rep.render()
    assert "experiment = mini-T2" in text and "conductor_train_range = [1,40000]" in text
    assert "seconds" not in text


def test_reports_are_byte_identical_across_reruns_and_workers(records, tmp_path):
    cfg = torsion_cfg(seed=3)
    a = run_experiment(cfg, records, workers=1).render()
    b = run_experiment(cfg, records, workers=2).render()
    assert a == b
    assert run_experiment(cfg.with_seed(4), records).render() != a


def test_report_write(records, tmp_path):
    rep = run_experiment(torsion_cfg(classifiers=("nb",)), records)
    paths = rep.write(tmp_path, "x")
    assert [p.name for p in paths] == ["x.report.txt", "x.nb.confusion.csv"]
    assert paths[0].read_text() == rep.render()
    assert paths[1].read_text().startswith("true\\predicted,1,2\n")


def test_target_per_class_caps_balanced_size(records):
    tr, va, _ = prepare_datasets(torsion_cfg(target_per_class=50), records)
    assert tr.class_counts() == {"1": 40, "2": 40} and va.class_counts() == {"1": 10, "2": 10}


def test_extrapolation_uses_disjoint_conductor_ranges(records):
    cfg = torsion_cfg(conductor_train_range=(1, 20000), conductor_validation_range=(20001, 40000))
    tr, va, _ = prepare_datasets(cfg, records)
    cond = {r.label: r.curve.conductor for r in records}
    assert all(cond[l] <= 20000 for l in tr.curve_labels)
    assert all(cond[l] > 20000 for l in va.curve_labels)
    assert not set(tr.curve_labels) & set(va.curve_labels)
    rep = run_experiment(cfg, records)
    assert rep.result("nb").precision >= 0.85


def test_empty_validation_range_is_an_error(records):
    with pytest.raises(ExperimentError, match="validation"):
        run_experiment(torsion_cfg(conductor_validation_range=(10**7, 10**8)), records)


def test_unlabeled_curves_are_skipped_and_counted(records):
    cfg = torsion_cfg(label_selector="integral_points", class_filter=("0", "1"), classifiers=("nb",))
    bare = [CurveRecord(r.curve, replace(r.labels, num_integral_points=None)) for r in records[:20]]
    renamed = [CurveRecord(replace(r.curve, label=r.label + "u"), r.labels) for r in bare]
    rep = run_experiment(cfg, records + renamed)
    assert rep.skipped_unlabeled == 20
    assert "skipped_unlabeled = 20" in rep.render()


def test_vector_kinds_run(records):
    for kind, N in (("binary", 40), ("ternary", 40), ("weierstrass", 1)):
        rep = run_experiment(torsion_cfg(vector_kind=kind, N=N, classifiers=("nb",)), records)
        assert 0 <= rep.precision <= 1


def test_vector_store_caches_and_derives(records, tmp_path):
    path = tmp_path / "cache.txt"
    store = VectorStore(path)
    recs = records[:6]
    full = store.get(recs, "L_elliptic", 30)
    store.save()
    assert path.read_text().startswith(CACHE_HEADER + "\n")
    assert len(cache_read(path)) == 6
    again = VectorStore(path)
    assert again.get(recs, "L_elliptic", 30) == full
    assert not again.dirty  # served from the file
    short = again.get(recs, "ternary", 10)
    assert not again.dirty
    assert [list(v.values) for v in short] == [list(np.sign(f.values[:10])) for f in full]
    assert full[0] == euler_vector_elliptic(recs[0].curve, 30)


def test_empty_store_passed_in_is_filled(records):
    store = VectorStore()
    run_experiment(torsion_cfg(classifiers=("nb",)), records, store)
    assert len(store) == len(records)


def vec_record(label, ip):
    return CurveRecord(EllipticCurveQ(label, 0, 0, 0, 1, 1, 1), CurveLabels(0, 1, num_integral_points=ip))


def test_zero_count_study_with_known_vectors(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text(CACHE_HEADER + "\nL_elliptic,4,a,0,1,0,2\nL_elliptic,4,b,0,0,0,3\nL_elliptic,4,c,1,1,1,1\n")
    store = VectorStore(path)
    out = zero_count_study([vec_record("a", 0), vec_record("b", 0), vec_record("c", 1)], N=4, store=store)
    assert (out["0"].mean, out["0"].std, out["0"].histogram) == (2.5, 0.5, {2: 1, 3: 1})
    assert (out["1"].mean, out["1"].std) == (0.0, 0.0)
    with pytest.raises(ExperimentError):
        zero_count_study([vec_record("a", 0)], N=4, store=store)


def test_synthetic_parity_dataset_shape():
    ds = synthetic_parity_dataset(7, 50, seed=2)
    assert ds.X.shape == (100, 7) and ds.class_names == ["mixed", "even"]
    even = ds.X[ds.y == 1]
    assert (even % 2 == 0).all() and even.min() >= -10 and even.max() <= 10
    assert ds.X[ds.y == 0].min() >= -10 and ds.X[ds.y == 0].max() <= 10
    assert np.array_equal(synthetic_parity_dataset(7, 50, seed=2).X, ds.X)


def test_synthetic_parity_dimension_control():
    small_forest = ForestHyper(num_trees=10)
    high = synthetic_parity_experiment(100, 500, seed=1, forest=small_forest)
    low = synthetic_parity_experiment(1, 500, seed=1, forest=small_forest)
    assert low["nb_accuracy"] < high["nb_accuracy"]
    assert high["nb_accuracy"] > 0.97
    with pytest.raises(ValueError):
        synthetic_parity_experiment(10, 50)


def test_coefficient_sweep(records):
    sweep = coefficient_sweep(torsion_cfg(classifiers=("nb",)), records, ns=[1, 5, 40])
    assert [n for n, _ in sweep] == [1, 5, 40]
    assert sweep[-1][1] >= sweep[0][1]
