import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dagsynth.discretize import (
    CATEGORICAL,
    CONTINUOUS,
    bin_dataset,
    fit_discretizer,
    fit_feature,
    infer_kind,
)
from dagsynth.errors import (
    BinOutOfRangeError,
    CategoricalHasNoCenterError,
    EmptyColumnError,
    UnknownCategoryError,
)


def brute_force_quantile_edges(values, k):
    """Independent oracle: sort, then linearly interpolate order statistics."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    edges = []
    for i in range(k + 1):
        h = (n - 1) * i / k
        lo = int(np.floor(h))
        hi = min(lo + 1, n - 1)
        edges.append(x[lo] + (h - lo) * (x[hi] - x[lo]))
    return np.array(edges)


class TestFit:
    def test_hundred_values_four_bins(self):
        values = np.arange(1, 101, dtype=float)
        spec = fit_feature(values, 4, CONTINUOUS, "v")
        expected = brute_force_quantile_edges(values, 4)
        np.testing.assert_allclose(spec.bin_edges, expected)
        np.testing.assert_allclose(spec.bin_edges, [1, 25.75, 50.5, 75.25, 100])
        bins = spec.values_to_bins(values)
        assert np.bincount(bins).tolist() == [25, 25, 25, 25]

    def test_matches_brute_force_on_random_data(self):
        rng = np.random.default_rng(5)
        values = rng.gamma(2.0, size=997)
        spec = fit_feature(values, 10, CONTINUOUS, "v")
        np.testing.assert_allclose(spec.bin_edges,
                                   np.unique(brute_force_quantile_edges(values, 10)))

    def test_constant_column_single_bin(self):
        spec = fit_feature(np.array([5.0, 5, 5, 5]), 50, CONTINUOUS, "c")
        assert spec.k_eff == 1
        assert spec.bin_edges.tolist() == [5.0, 5.0]

    def test_categorical_one_bin_per_category(self):
        spec = fit_feature(np.array(["A", "B", "A", "C"], dtype=object), 50,
                           CATEGORICAL, "c")
        assert spec.k_eff == 3
        assert spec.categories == ["A", "B", "C"]

    def test_duplicate_edges_merge(self):
        # heavy ties at 1.0 collapse interior quantile edges
        values = np.concatenate([np.ones(900), np.linspace(2, 3, 100)])
        spec = fit_feature(values, 10, CONTINUOUS, "v")
        assert spec.k_eff < 10
        assert np.all(np.diff(spec.bin_edges) > 0)

    def test_empty_column_raises(self):
        with pytest.raises(EmptyColumnError):
            fit_feature(np.array([]), 4, CONTINUOUS, "v")

    def test_k_below_two_rejected(self):
        with pytest.raises(ValueError):
            fit_discretizer(pd.DataFrame({"a": [1.0, 2.0]}), k=1)

    def test_determinism(self):
        rng = np.random.default_rng(9)
        values = rng.normal(size=500)
        a = fit_feature(values, 8, CONTINUOUS, "v")
        b = fit_feature(values.copy(), 8, CONTINUOUS, "v")
        np.testing.assert_array_equal(a.bin_edges, b.bin_edges)


class TestToBins:
    def setup_method(self):
        self.spec = fit_feature(np.array([0.0, 10.0, 20.0]), 2, CONTINUOUS, "v")
        # edges are exactly [0, 10, 20]

    def test_boundary_goes_right(self):
        assert self.spec.values_to_bins(np.array([10.0]))[0] == 1

    def test_below_range_clamps_to_first(self):
        assert self.spec.values_to_bins(np.array([-3.0]))[0] == 0

    def test_interior_containment(self):
        assert self.spec.values_to_bins(np.array([15.0]))[0] == 1

    def test_max_value_in_last_bin(self):
        assert self.spec.values_to_bins(np.array([20.0]))[0] == 1
        assert self.spec.values_to_bins(np.array([99.0]))[0] == 1

    def test_unknown_category(self):
        spec = fit_feature(np.array(["A", "B"], dtype=object), 4, CATEGORICAL, "c")
        with pytest.raises(UnknownCategoryError):
            spec.values_to_bins(np.array(["Z"], dtype=object))


class TestFromBin:
    def test_uniform_within_bin(self):
        spec = fit_feature(np.array([0.0, 5.0, 10.0]), 1, CONTINUOUS, "v")
        spec.bin_edges = np.array([0.0, 10.0])
        rng = np.random.default_rng(0)
        draws = np.array([spec.sample_in_bin(0, rng) for _ in range(20000)])
        assert draws.min() >= 0 and draws.max() < 10
        assert abs(draws.mean() - 5.0) < 0.1  # 4 sigma ~ 0.08

    def test_categorical_identity(self):
        spec = fit_feature(np.array(["A", "B"], dtype=object), 4, CATEGORICAL, "c")
        assert spec.sample_in_bin(0, np.random.default_rng(0)) == "A"

    def test_zero_width_bin_returns_edge(self):
        spec = fit_feature(np.array([7.0, 7.0, 7.0]), 5, CONTINUOUS, "v")
        assert spec.sample_in_bin(0, np.random.default_rng(0)) == 7.0

    def test_out_of_range_bin(self):
        spec = fit_feature(np.array([0.0, 1.0]), 2, CONTINUOUS, "v")
        with pytest.raises(BinOutOfRangeError):
            spec.sample_in_bin(99, np.random.default_rng(0))


class TestBinCenter:
    def test_midpoints(self):
        spec = fit_feature(np.array([0.0, 10.0, 30.0]), 2, CONTINUOUS, "v")
        spec.bin_edges = np.array([0.0, 10.0, 30.0])
        assert spec.bin_center(0) == 5.0
        assert spec.bin_center(1) == 20.0

    def test_categorical_has_no_center(self):
        spec = fit_feature(np.array(["A"], dtype=object), 4, CATEGORICAL, "c")
        with pytest.raises(CategoricalHasNoCenterError):
            spec.bin_center(0)


class TestProperties:
    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6,
                              allow_nan=False, allow_infinity=False),
                    min_size=30, max_size=200),
           st.integers(min_value=2, max_value=10))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_same_bin(self, values, k):
        values = np.asarray(values)
        spec = fit_feature(values, k, CONTINUOUS, "v")
        rng = np.random.default_rng(1)
        bins = spec.values_to_bins(values)
        redrawn = np.array([spec.sample_in_bin(int(b), rng) for b in bins])
        np.testing.assert_array_equal(spec.values_to_bins(redrawn), bins)

    @given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=1000))
    @settings(max_examples=40, deadline=None)
    def test_quantile_balance_distinct_values(self, k, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(k * 3, 400))
        values = rng.permutation(np.linspace(0, 1, n) ** 2)
        spec = fit_feature(values, k, CONTINUOUS, "v")
        pops = np.bincount(spec.values_to_bins(values), minlength=spec.k_eff)
        assert pops.max() - pops.min() <= 1

    def test_kind_inference(self):
        assert infer_kind(np.array(["1", "2.5"])) == CONTINUOUS
        assert infer_kind(np.array(["a", "b"])) == CATEGORICAL


def test_bin_dataset_shapes():
    df = pd.DataFrame({"x": np.linspace(0, 1, 40), "c": ["a", "b"] * 20})
    disc = fit_discretizer(df, k=4)
    data = bin_dataset(disc, df)
    assert data.bins.shape == (40, 2)
    assert data.bins[:, 0].max() < disc.features[0].k_eff
    assert len(data.raw_columns) == 2
