import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from curveml.curves import CurveLabels, CurveRecord, EllipticCurveQ, Genus2CurveQ
from curveml.data_io import (
    CACHE_HEADER,
    CacheFormatError,
    DataFormatError,
    ELLIPTIC_COLUMNS,
    GENUS2_COLUMNS,
    cache_dumps,
    cache_read,
    cache_write,
    detect_family,
    read_curves,
    read_elliptic_csv,
    read_genus2_csv,
    write_elliptic_csv,
    write_genus2_csv,
)
from curveml.features import EulerVector

EHEAD = ",".join(ELLIPTIC_COLUMNS)
GHEAD = ",".join(GENUS2_COLUMNS)
G_ROW = "g,1,0,0,0,0,1,0,0,0,0,0,10,3276800000,0,1,2,1"


def write(tmp_path, text, name="in.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_read_elliptic_example_row(tmp_path):
    p = write(tmp_path, EHEAD + "\n11a1,0,1,-1,-10,-20,11,161051,0,5,5,,1\n")
    (r,) = read_elliptic_csv(p)
    assert r.label == "11a1" and r.curve.coefficients == (0, 1, -1, -10, -20)
    assert (r.labels.rank, r.labels.torsion_order, r.labels.torsion_structure) == (0, 5, [5])
    assert r.labels.num_integral_points is None and r.labels.sha_analytic_order == 1
    assert r.curve.discriminant_abs == 161051


def test_header_only_gives_no_records(tmp_path):
    assert read_elliptic_csv(write(tmp_path, EHEAD + "\n")) == []
    assert read_genus2_csv(write(tmp_path, GHEAD + "\n", "g.csv")) == []


def test_e1_out_of_range_names_row_and_column(tmp_path):
    p = write(tmp_path, EHEAD + "\n11a1,0,1,-1,-10,-20,11,161051,0,5,5,,1\nbad,2,1,-1,-10,-20,11,,0,1,,,\n")
    with pytest.raises(DataFormatError, match="e1 out of range") as info:
        read_elliptic_csv(p)
    assert info.value.line == 3 and info.value.column == "e1"


def test_malformed_integer_and_missing_column(tmp_path):
    with pytest.raises(DataFormatError, match="malformed integer") as info:
        read_elliptic_csv(write(tmp_path, EHEAD + "\nx,0,0,0,1,zz,11,,0,1,,,\n"))
    assert info.value.column == "e5"
    with pytest.raises(DataFormatError, match="rank"):
        read_elliptic_csv(write(tmp_path, "label,e1,e2,e3,e4,e5,conductor,torsion_order\n", "m.csv"))


def test_unknown_columns_ignored_and_sha_may_be_fractional(tmp_path):
    p = write(tmp_path, "extra," + EHEAD + "\nzzz,a,0,0,0,1,0,64,,0,2,2,3,1.0\n")
    (r,) = read_elliptic_csv(p)
    assert r.labels.num_integral_points == 3 and r.labels.sha_analytic_order == 1.0


def test_collecting_errors_never_drops_rows(tmp_path):
    rows = [
        "ok1,0,1,-1,-10,-20,11,161051,0,5,5,,1",
        "bad1,5,1,-1,-10,-20,11,,0,1,,,",
        "ok2,0,0,0,1,0,64,64,0,2,2,,",
        "bad2,0,0,0,1,0,64,,0,4,3,,",  # structure product 3 != order 4
        ",0,0,0,1,0,64,,0,2,,,",
        "bad3,0,0,0,1,0,64,,zero,2,,,",
    ]
    p = write(tmp_path, EHEAD + "\n" + "\n".join(rows) + "\n")
    errors = []
    recs = read_elliptic_csv(p, errors)
    assert [r.label for r in recs] == ["ok1", "ok2"]
    assert len(recs) + len(errors) == len(rows)
    assert [e.line for e in errors] == [3, 5, 6, 7]


def test_read_genus2(tmp_path):
    (r,) = read_genus2_csv(write(tmp_path, GHEAD + "\n" + G_ROW + "\n"))
    assert r.curve.f_coeffs == (1, 0, 0, 0, 0, 1, 0) and r.curve.discriminant_abs == 3276800000
    assert r.labels.num_rational_points == 2 and r.labels.sha_is_trivial is True
    assert r.family == "genus2"


def test_genus2_missing_discriminant_and_extra_column(tmp_path):
    bad = G_ROW.replace(",3276800000,", ",,")
    with pytest.raises(DataFormatError, match="discriminant_abs"):
        read_genus2_csv(write(tmp_path, GHEAD + "\n" + bad + "\n"))
    (r,) = read_genus2_csv(write(tmp_path, GHEAD + ",f7\n" + G_ROW + ",9\n", "x.csv"))
    assert r.curve.f_coeffs[-1] == 0
    with pytest.raises(DataFormatError, match="sha_is_trivial"):
        read_genus2_csv(write(tmp_path, GHEAD + "\n" + G_ROW[:-1] + "7\n", "y.csv"))


def test_detect_family(tmp_path):
    assert detect_family(write(tmp_path, EHEAD + "\n", "e.csv")) == "elliptic"
    assert detect_family(write(tmp_path, GHEAD + "\n", "g.csv")) == "genus2"
    with pytest.raises(DataFormatError):
        detect_family(write(tmp_path, "a,b\n", "n.csv"))
    with pytest.raises(ValueError):
        read_curves(tmp_path / "e.csv", "genus3")


def test_fixture_files_round_trip(tmp_path, elliptic_records, genus2_records):
    write_elliptic_csv(tmp_path / "e.csv", elliptic_records)
    write_genus2_csv(tmp_path / "g.csv", genus2_records)
    assert read_elliptic_csv(tmp_path / "e.csv") == elliptic_records
    assert read_genus2_csv(tmp_path / "g.csv") == genus2_records


small = st.integers(-(10**30), 10**30)
labels_st = st.text(st.characters(whitelist_categories=("Ll", "Lu", "Nd"), whitelist_characters=".-_"), min_size=1, max_size=12)


@st.composite
def elliptic_records_st(draw):
    e = (draw(st.sampled_from([0, 1])), draw(st.sampled_from([-1, 0, 1])), draw(st.sampled_from([-1, 0, 1])),
         draw(small), draw(small))  # fmt: skip
    structure = draw(st.sampled_from([[], [2], [3], [2, 2], [2, 4], [5], [7], [2, 6]]))
    order = int(np.prod(structure)) if structure else 1
    labels = CurveLabels(
        draw(st.integers(0, 5)), order, structure, draw(st.none() | st.integers(0, 50)),
        sha_analytic_order=draw(st.none() | st.sampled_from([1, 4, 9, 16])),
    )  # fmt: skip
    curve = EllipticCurveQ(draw(labels_st), *e, draw(st.integers(1, 10**9)), draw(st.none() | st.integers(1, 10**40)))
    return CurveRecord(curve, labels)


@st.composite
def genus2_records_st(draw):
    f = tuple(draw(st.lists(small, min_size=7, max_size=7)))
    h = tuple(draw(st.lists(st.integers(-3, 3), min_size=4, max_size=4)))
    labels = CurveLabels(draw(st.integers(0, 3)), draw(st.integers(1, 30)), num_rational_points=draw(st.none() | st.integers(0, 40)),
                         sha_is_trivial=draw(st.none() | st.booleans()))  # fmt: skip
    return CurveRecord(Genus2CurveQ(draw(labels_st), f, h, draw(st.integers(1, 10**9)), draw(st.integers(1, 10**50))), labels)


@settings(max_examples=50, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(elliptic_records_st(), max_size=8), st.lists(genus2_records_st(), max_size=8))
def test_csv_round_trip_property(tmp_path, ell, g2):
    write_elliptic_csv(tmp_path / "e.csv", ell)
    write_genus2_csv(tmp_path / "g.csv", g2)
    assert read_elliptic_csv(tmp_path / "e.csv") == ell
    assert read_genus2_csv(tmp_path / "g.csv") == g2


# --- cache -------------------------------------------------------------------


def test_cache_round_trip_and_layout(tmp_path):
    vecs = [
        EulerVector("11a1", "L_elliptic", 3, np.array([-2, -1, 1])),
        EulerVector("g", "L_genus2", 2, np.array([0, 0, 0, 5])),
        EulerVector("w", "weierstrass", 1, np.array([0, 1, -1, 10**30, -(10**40)], dtype=object)),
        EulerVector("b", "binary", 2, np.array([1, 0])),
    ]
    text = cache_dumps(vecs)
    assert text.splitlines()[:3] == [CACHE_HEADER, "L_elliptic,3,11a1,-2,-1,1", "L_genus2,2,g,0,0,0,5"]
    cache_write(tmp_path / "c.txt", vecs)
    assert cache_read(tmp_path / "c.txt") == vecs


@given(st.lists(st.lists(st.integers(-60, 60), min_size=1, max_size=30), max_size=10))
def test_cache_round_trip_property(rows):
    import tempfile
    from pathlib import Path

    vecs = [EulerVector(f"c{i}", "L_elliptic", len(r), np.array(r)) for i, r in enumerate(rows)]
    with tempfile.TemporaryDirectory() as d:
        cache_write(Path(d) / "c", vecs)
        assert cache_read(Path(d) / "c") == vecs


def test_cache_errors(tmp_path):
    p = write(tmp_path, CACHE_HEADER + "\n", "empty.txt")
    assert cache_read(p) == []
    with pytest.raises(CacheFormatError, match="line 1"):
        cache_read(write(tmp_path, "# curveml-euler-cache v0\n", "v0.txt"))
    with pytest.raises(CacheFormatError, match="line 3"):
        cache_read(write(tmp_path, CACHE_HEADER + "\nL_elliptic,2,a,1,2\nL_elliptic,3,b,1\n", "short.txt"))
    with pytest.raises(CacheFormatError, match="line 2: truncated"):
        cache_read(write(tmp_path, CACHE_HEADER + "\nL_elliptic\n", "trunc.txt"))
    with pytest.raises(CacheFormatError, match="unknown vector kind"):
        cache_read(write(tmp_path, CACHE_HEADER + "\nfoo,1,a,1\n", "kind.txt"))
    with pytest.raises(ValueError):
        cache_dumps([EulerVector("a,b", "L_elliptic", 1, np.array([1]))])
