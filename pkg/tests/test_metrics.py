import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from curveml.metrics import (
    ConfusionMatrix,
    histogram_csv,
    mcc,
    mcc_binary,
    mcc_multiclass,
    precision,
    render_kv,
    summarize_counts,
)


def cm(counts):
    counts = np.asarray(counts)
    return ConfusionMatrix(counts, [str(k) for k in range(len(counts))])


def covariance_oracle(counts):
    """cov(T, P) / sqrt(cov(T, T) cov(P, P)) with cov summed over one-hot
    columns, evaluated on the expanded sample matrices."""
    counts = np.asarray(counts)
    K = len(counts)
    truth, pred = [], []
    for i in range(K):
        for j in range(K):
            truth += [i] * int(counts[i, j])
            pred += [j] * int(counts[i, j])
    T = np.eye(K)[truth]
    P = np.eye(K)[pred]

    def cov(A, B):
        return float(np.sum((A - A.mean(axis=0)) * (B - B.mean(axis=0))))

    denom = cov(T, T) * cov(P, P)
    return 0.0 if denom == 0 else cov(T, P) / np.sqrt(denom)


def test_precision_examples():
    assert precision(cm(np.diag([10, 10]))) == 1.0
    assert precision(cm([[5, 5], [5, 5]])) == 0.5
    assert precision(cm([[40, 10], [5, 45]])) == 0.85
    with pytest.raises(ValueError):
        precision(cm(np.zeros((2, 2), dtype=int)))


def test_mcc_examples():
    assert mcc(cm(np.diag([7, 9]))) == 1.0
    assert mcc(cm(np.diag([3, 4, 5]))) == pytest.approx(1.0)
    assert mcc(cm([[10, 0], [10, 0]])) == 0.0  # everything predicted as class 0
    assert mcc(cm([[0, 6, 0], [0, 9, 0], [0, 2, 0]])) == 0.0
    assert mcc_binary(tp=40, tn=45, fp=5, fn=10) == pytest.approx(0.7035, abs=1e-4)
    # same case through the matrix layout: rows true (neg, pos), columns predicted
    assert mcc(cm([[45, 5], [10, 40]])) == pytest.approx(0.7035, abs=1e-4)
    assert mcc(cm([[0, 5], [5, 0]])) == -1.0


@given(st.lists(st.integers(0, 1000), min_size=4, max_size=4))
def test_binary_and_multiclass_formulas_agree(v):
    tn, fp, fn, tp = v
    assume(sum(v) > 0)
    assert abs(mcc_binary(tp, tn, fp, fn) - mcc_multiclass([[tn, fp], [fn, tp]])) < 1e-12


@given(st.integers(2, 5).flatmap(lambda K: st.lists(st.integers(0, 30), min_size=K * K, max_size=K * K)))
def test_multiclass_mcc_matches_covariance_definition(flat):
    K = int(round(len(flat) ** 0.5))
    counts = np.array(flat).reshape(K, K)
    assume(counts.sum() > 0)
    assert mcc(cm(counts)) == pytest.approx(covariance_oracle(counts), abs=1e-9)


@given(st.integers(2, 5).flatmap(lambda K: st.lists(st.integers(0, 50), min_size=K * K, max_size=K * K)))
def test_precision_is_trace_over_total_and_mcc_bounded(flat):
    K = int(round(len(flat) ** 0.5))
    counts = np.array(flat).reshape(K, K)
    assume(counts.sum() > 0)
    c = cm(counts)
    assert precision(c) == np.trace(counts) / counts.sum()
    assert 0.0 <= precision(c) <= 1.0
    assert -1.0 - 1e-12 <= mcc(c) <= 1.0 + 1e-12


def test_confusion_from_predictions():
    c = ConfusionMatrix.from_predictions([0, 0, 1, 2, 2, 2], [0, 1, 1, 2, 0, 2], ["a", "b", "c"])
    assert c.counts.tolist() == [[1, 1, 0], [0, 1, 0], [1, 0, 2]]
    assert c.total == 6
    assert c.to_csv() == "true\\predicted,a,b,c\na,1,1,0\nb,0,1,0\nc,1,0,2\n"
    with pytest.raises(ValueError):
        ConfusionMatrix(np.zeros((2, 3)), ["a", "b"])


def test_summarize_counts_examples():
    s = summarize_counts([5, 5, 5])
    assert (s.mean, s.std, s.histogram) == (5.0, 0.0, {5: 3})
    s = summarize_counts([0, 10])
    assert (s.mean, s.std) == (5.0, 5.0)
    assert sum(s.histogram.values()) == 2 and s.histogram[0] == 1 and s.histogram[10] == 1
    s = summarize_counts([1, 2, 3, 4])
    assert s.mean == 2.5 and s.std == pytest.approx(1.1180, abs=1e-4)
    with pytest.raises(ValueError):
        summarize_counts([])


@given(st.lists(st.integers(0, 60), min_size=1, max_size=200))
def test_summary_matches_numpy(values):
    s = summarize_counts(values)
    assert s.mean == pytest.approx(np.mean(values))
    assert s.std == pytest.approx(np.std(values), abs=1e-9)
    assert sum(s.histogram.values()) == len(values)
    assert all(s.histogram[v] == values.count(v) for v in set(values))


def test_histogram_csv_and_render_kv():
    text = histogram_csv({"0": summarize_counts([1, 1, 3]), "1": summarize_counts([2])})
    assert text == "group,bin,count\n0,1,2\n0,2,0\n0,3,1\n1,2,1\n"
    assert render_kv({"a": 1, "b": 0.5, "c": "x"}) == "a = 1\nb = 0.500000\nc = x\n"
