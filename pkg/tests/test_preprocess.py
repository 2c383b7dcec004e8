import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stdsa import Dataset, default_schema, normalize, box_stats, pcc_matrix
from stdsa.errors import ConstantColumn, DegenerateIndicatorWarning, EmptyInput
from stdsa.preprocess import pcc_to_csv, box_stats_to_csv, outliers_to_csv

from conftest import datasets

KEYS = default_schema().keys


def toy(columns: dict[str, list[float]], names=None) -> Dataset:
    n = len(next(iter(columns.values())))
    names = names or [f"R{i}" for i in range(n)]
    rows = []
    for i, name in enumerate(names):
        vals = {k: float(j + i * (j + 1)) for j, k in enumerate(KEYS)}
        vals["infection"] = (i + 1) / (n + 1)
        vals.update({k: v[i] for k, v in columns.items()})
        rows.append((name, vals))
    return Dataset.from_rows(rows)


def test_sample_alone_gives_local_bounds(sample_dataset):
    nd = normalize(sample_dataset)
    # (113 - 100) / (194 - 100); the published 0.16 needs the full dataset's bounds
    assert nd.value("France", "government_risk_management") == pytest.approx(13 / 94)
    assert abs(nd.value("France", "government_risk_management") - 0.16) > 0.01
    assert nd.value("Germany", "government_risk_management") == 1.0
    assert nd.bounds["government_risk_management"] == (100.0, 194.0)


def test_minimum_maps_to_exact_zero(sample_dataset):
    nd = normalize(sample_dataset)
    for j, key in enumerate(KEYS):
        col = sample_dataset.matrix()[:, j]
        assert nd.matrix[np.argmin(col), j] == 0.0
        assert nd.matrix[np.argmax(col), j] == 1.0


def test_table3_is_an_affine_image_of_table2(sample_dataset, table3_rows):
    # Recover each column's (min, max) by least squares from the published
    # pairs, then normalize the raw sample with them: every Table 3 cell must
    # come back within the table's rounding.
    regions = list(table3_rows)
    raw = np.array([[sample_dataset.value(r, k) for k in KEYS] for r in regions])
    pub = np.array([[table3_rows[r][k] for k in KEYS] for r in regions])
    bounds = {}
    for j, key in enumerate(KEYS):
        a, b = np.polyfit(raw[:, j], pub[:, j], 1)
        lo = -b / a
        bounds[key] = (lo, lo + 1 / a)
    nd = normalize(sample_dataset, bounds=bounds)
    assert np.abs(nd.matrix - pub).max() <= 0.01 + 1e-9
    # bound implied for infection (0.41 -> 0.75)
    assert bounds["infection"][1] == pytest.approx(0.546, abs=0.01)


def test_degenerate_indicator_maps_to_zero():
    ds = toy({"education_level": [5.0, 5.0, 5.0]})
    with pytest.warns(DegenerateIndicatorWarning, match="education_level"):
        nd = normalize(ds)
    assert np.all(nd.column("education_level") == 0.0)


def test_empty_dataset():
    with pytest.raises(EmptyInput):
        normalize(Dataset(()))


@settings(max_examples=80, deadline=None)
@given(datasets(min_size=2, max_size=10))
def test_normalize_properties(ds):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateIndicatorWarning)
        nd = normalize(ds)
        again = normalize(nd.to_dataset())
    assert np.all((nd.matrix >= 0) & (nd.matrix <= 1))
    raw = ds.matrix()
    for j in range(len(KEYS)):
        col = raw[:, j]
        if col.max() > col.min():
            assert nd.matrix[:, j].min() == 0.0 and nd.matrix[:, j].max() == 1.0
            for a in range(len(col)):
                for b in range(len(col)):
                    if col[a] < col[b]:
                        # strict unless the gap is below float resolution of the range
                        if (col[b] - col[a]) > 1e-12 * (col.max() - col.min()):
                            assert nd.matrix[a, j] < nd.matrix[b, j]
                        else:
                            assert nd.matrix[a, j] <= nd.matrix[b, j]
    np.testing.assert_array_equal(again.matrix, nd.matrix)


def test_box_stats_type7_quartiles():
    ds = toy({"education_level": [1.0, 2.0, 3.0, 4.0]})
    s = box_stats(ds)["education_level"]
    assert (s.min, s.q1, s.median, s.q3, s.max) == (1.0, 1.75, 2.5, 3.25, 4.0)
    assert s.outliers == ()


def test_box_stats_single_region(sample_dataset):
    one = Dataset(sample_dataset.records[:1])
    for s in box_stats(one).values():
        assert s.min == s.q1 == s.median == s.q3 == s.max
        assert s.outliers == ()


def test_box_stats_flags_far_value():
    ds = toy({"population_density": [10.0, 11.0, 12.0, 13.0, 14.0, 500.0]})
    s = box_stats(ds)["population_density"]
    assert s.outliers == (("R5", 500.0),)


@settings(max_examples=80, deadline=None)
@given(datasets(min_size=1, max_size=12))
def test_outlier_rule(ds):
    stats = box_stats(ds)
    raw = ds.matrix()
    for j, key in enumerate(KEYS):
        s = stats[key]
        assert s.min <= s.q1 <= s.median <= s.q3 <= s.max
        lo, hi = s.fences
        listed = {r for r, _ in s.outliers}
        for region, v in zip(ds.regions, raw[:, j]):
            assert (region in listed) == (v < lo or v > hi)


def test_pcc_toy_perfect_correlation():
    ds = toy({"education_level": [1.0, 2.0, 3.0], "young_distribution": [2.0, 4.0, 6.0]})
    assert pcc_matrix(ds)["education_level", "young_distribution"] == pytest.approx(1.0)


def test_pcc_matrix_shape(sample_dataset):
    c = pcc_matrix(sample_dataset)
    assert c.values.shape == (9, 9)
    np.testing.assert_array_equal(np.diag(c.values), np.ones(9))
    np.testing.assert_array_equal(c.values, c.values.T)
    assert np.all(np.abs(c.values) <= 1)
    text = pcc_to_csv(c).splitlines()
    assert len(text) == 10 and text[0].split(",")[1:] == list(KEYS)


def test_pcc_constant_column():
    ds = toy({"education_level": [3.0, 3.0, 3.0]})
    with pytest.raises(ConstantColumn):
        pcc_matrix(ds)
    with pytest.raises(EmptyInput):
        pcc_matrix(Dataset(ds.records[:1]))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100), st.floats(-100, 100), st.sampled_from(KEYS[1:]))
def test_pcc_affine_invariance(sample_dataset, a, b, key):
    rows = []
    for rec in sample_dataset.records:
        vals = dict(rec.values)
        # keep density non-negative
        vals[key] = a * vals[key] + (abs(b) if key == "population_density" else b)
        rows.append((rec.region, vals))
    shifted = Dataset.from_rows(rows)
    np.testing.assert_allclose(pcc_matrix(shifted).values, pcc_matrix(sample_dataset).values, atol=1e-9)


def test_exports(sample_dataset):
    stats = box_stats(sample_dataset)
    assert box_stats_to_csv(stats).splitlines()[0] == "indicator,min,q1,median,q3,max,n_outliers"
    assert outliers_to_csv(stats).splitlines()[0] == "indicator,region,value"
