"""Quantile discretization: raw columns <-> per-feature bin indices.

Continuous columns are cut at type-7 (linearly interpolated) quantiles so
each bin holds an equal share of the training sample; duplicate quantile
edges are merged, so the effective bin count of a column can be smaller
than the requested one. Categorical columns map lexicographically sorted
categories to indices. Binning uses half-open intervals [edge_k, edge_{k+1})
with the last bin closed on the right; out-of-range values clamp to the
boundary bins so generation never fails on unseen tails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import (
    BinOutOfRangeError,
    CategoricalHasNoCenterError,
    EmptyColumnError,
    UnknownCategoryError,
    UnknownFeatureError,
)

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


@dataclass
class FeatureSpec:
    """Binning recipe for one column.

    For continuous columns ``bin_edges`` has ``k_eff + 1`` non-decreasing
    entries with the first edge at the training minimum and the last at the
    maximum. For categorical columns ``categories`` is the sorted category
    list and ``k_eff`` equals its length.
    """

    name: str
    kind: str
    bin_edges: np.ndarray | None = None
    categories: list[str] | None = None
    k_requested: int = 0
    _cat_index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind == CATEGORICAL and self.categories is not None:
            self._cat_index = {c: i for i, c in enumerate(self.categories)}

    @property
    def k_eff(self) -> int:
        if self.kind == CATEGORICAL:
            return len(self.categories)
        return len(self.bin_edges) - 1

    def values_to_bins(self, values: np.ndarray) -> np.ndarray:
        if self.kind == CATEGORICAL:
            out = np.empty(len(values), dtype=np.int32)
            for i, v in enumerate(values):
                try:
                    out[i] = self._cat_index[str(v)]
                except KeyError:
                    raise UnknownCategoryError(
                        f"category {v!r} of feature {self.name!r} not seen in training"
                    ) from None
            return out
        vals = np.asarray(values, dtype=np.float64)
        idx = np.searchsorted(self.bin_edges, vals, side="right") - 1
        return np.clip(idx, 0, self.k_eff - 1).astype(np.int32)

    def bin_interval(self, b: int) -> tuple[float, float]:
        if self.kind == CATEGORICAL or not 0 <= b < self.k_eff:
            raise BinOutOfRangeError(f"bin {b} invalid for feature {self.name!r}")
        return float(self.bin_edges[b]), float(self.bin_edges[b + 1])

    def bin_center(self, b: int):
        if self.kind == CATEGORICAL:
            raise CategoricalHasNoCenterError(
                f"feature {self.name!r} is categorical; bins have no numeric center"
            )
        lo, hi = self.bin_interval(b)
        return 0.5 * (lo + hi)

    def sample_in_bin(self, b: int, rng: np.random.Generator):
        """Uniform draw inside bin ``b`` (the category itself when categorical)."""
        if self.kind == CATEGORICAL:
            if not 0 <= b < self.k_eff:
                raise BinOutOfRangeError(f"bin {b} invalid for feature {self.name!r}")
            return self.categories[b]
        lo, hi = self.bin_interval(b)
        if hi <= lo:
            return lo
        return lo + (hi - lo) * rng.random()


@dataclass
class Discretizer:
    """Fitted per-column binning for a whole table."""

    features: list[FeatureSpec]

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    @property
    def d(self) -> int:
        return len(self.features)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownFeatureError(f"no such feature: {name!r}") from None

    def to_bins(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        """Bin a table given as per-feature columns; returns an (n, d) int matrix."""
        if len(columns) != self.d:
            raise ValueError(f"expected {self.d} columns, got {len(columns)}")
        cols = [f.values_to_bins(np.atleast_1d(c)) for f, c in zip(self.features, columns)]
        return np.column_stack(cols)

    def to_bins_row(self, raw_row: Sequence) -> np.ndarray:
        return self.to_bins([np.atleast_1d(v) for v in raw_row])[0]

    def from_bin(self, feature: int, b: int, rng: np.random.Generator):
        return self.features[feature].sample_in_bin(b, rng)

    def bin_center(self, feature: int, b: int):
        return self.features[feature].bin_center(b)

    def to_raw_rows(self, bins: np.ndarray, rng: np.random.Generator) -> list[list]:
        """Inverse transform a bin matrix to raw rows (uniform within bins)."""
        out = []
        for row in bins:
            out.append([self.from_bin(j, int(row[j]), rng) for j in range(self.d)])
        return out


@dataclass
class BinnedDataset:
    """Binned training table plus the raw columns it came from."""

    disc: Discretizer
    bins: np.ndarray          # (n, d) int32
    raw_columns: list[np.ndarray]

    @property
    def n(self) -> int:
        return self.bins.shape[0]


def infer_kind(values: np.ndarray) -> str:
    """Numeric parse success means continuous, anything else categorical."""
    try:
        np.asarray(values, dtype=np.float64)
        return CONTINUOUS
    except (TypeError, ValueError):
        return CATEGORICAL


def coerce_table(data) -> tuple[list[np.ndarray], list[str]]:
    """Normalize a DataFrame or 2-D array into (columns, names)."""
    if isinstance(data, pd.DataFrame):
        return [data[c].to_numpy() for c in data.columns], [str(c) for c in data.columns]
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise ValueError("expected a DataFrame or 2-D array")
    return [arr[:, j] for j in range(arr.shape[1])], [f"X{j + 1}" for j in range(arr.shape[1])]


def fit_feature(values: np.ndarray, k: int, kind: str, name: str) -> FeatureSpec:
    if len(values) == 0:
        raise EmptyColumnError(f"feature {name!r} has no rows")
    if kind == CATEGORICAL:
        cats = sorted({str(v) for v in values})
        return FeatureSpec(name=name, kind=CATEGORICAL, categories=cats, k_requested=k)
    vals = np.asarray(values, dtype=np.float64)
    if np.any(~np.isfinite(vals)):
        raise EmptyColumnError(f"feature {name!r} contains non-finite values")
    # type-7 quantiles by direct interpolation of order statistics; positions
    # use one exact integer product per edge so integer positions stay exact
    # and boundary samples land in their own bin
    sx = np.sort(vals)
    n = len(sx)
    h = (n - 1) * np.arange(k + 1) / k
    lo = np.floor(h).astype(int)
    hi = np.minimum(lo + 1, n - 1)
    g = h - lo
    edges = sx[lo] + g * (sx[hi] - sx[lo])
    edges = np.unique(edges)
    if len(edges) == 1:
        # constant column: a single zero-width bin
        edges = np.array([edges[0], edges[0]])
    return FeatureSpec(name=name, kind=CONTINUOUS, bin_edges=edges, k_requested=k)


def fit_discretizer(data, k: int, kinds: Sequence[str] | None = None,
                    names: Sequence[str] | None = None) -> Discretizer:
    """Fit per-column quantile binning with ``k`` requested bins.

    ``kinds`` overrides per-column inference; ``names`` overrides DataFrame
    column names (required for plain arrays only if defaults are unwanted).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    columns, default_names = coerce_table(data)
    names = list(names) if names is not None else default_names
    if kinds is None:
        kinds = [infer_kind(c) for c in columns]
    specs = [fit_feature(c, k, kd, nm) for c, kd, nm in zip(columns, kinds, names)]
    return Discretizer(features=specs)


def bin_dataset(disc: Discretizer, data) -> BinnedDataset:
    columns, _ = coerce_table(data)
    cast = [
        np.asarray(c, dtype=np.float64) if f.kind == CONTINUOUS else np.asarray(c, dtype=object)
        for f, c in zip(disc.features, columns)
    ]
    return BinnedDataset(disc=disc, bins=disc.to_bins(cast), raw_columns=cast)
