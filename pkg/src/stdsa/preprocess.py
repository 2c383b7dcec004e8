"""Min-Max normalization and descriptive statistics over a region dataset."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConstantColumn, DegenerateIndicatorWarning, EmptyInput, UnknownRegion
from .schema import Dataset, IndicatorSchema, clean_region_name


@dataclass(frozen=True, eq=False)
class NormalizedDataset:
    """Per-indicator Min-Max scaled values plus the bounds used to scale them.

    ``matrix`` has one row per region and one column per schema key, in schema
    order. It is made read-only on construction.
    """

    regions: tuple[str, ...]
    matrix: np.ndarray
    bounds: Mapping[str, tuple[float, float]]
    schema: IndicatorSchema

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "bounds", dict(self.bounds))
        object.__setattr__(self, "_index", {r: i for i, r in enumerate(self.regions)})

    def __len__(self):
        return len(self.regions)

    def __eq__(self, other):
        if not isinstance(other, NormalizedDataset):
            return NotImplemented
        return (self.regions == other.regions and self.bounds == other.bounds
                and np.array_equal(self.matrix, other.matrix))

    def index(self, region: str) -> int:
        name = clean_region_name(region)
        try:
            return self._index[name]
        except KeyError:
            raise UnknownRegion(f"unknown region '{name}'") from None

    def __contains__(self, region: str) -> bool:
        return clean_region_name(region) in self._index

    def value(self, region: str, key: str) -> float:
        return float(self.matrix[self.index(region), self.schema.keys.index(key)])

    def column(self, key: str) -> np.ndarray:
        return self.matrix[:, self.schema.keys.index(key)]

    def vectors(self, keys) -> np.ndarray:
        cols = [self.schema.keys.index(k) for k in keys]
        return self.matrix[:, cols]

    @property
    def records(self) -> list[tuple[str, dict[str, float]]]:
        keys = self.schema.keys
        return [(r, dict(zip(keys, map(float, row)))) for r, row in zip(self.regions, self.matrix)]

    def to_dataset(self) -> Dataset:
        return Dataset.from_rows(self.records, self.schema)


def dataset_bounds(dataset: Dataset) -> dict[str, tuple[float, float]]:
    m = dataset.matrix()
    return {k: (float(m[:, j].min()), float(m[:, j].max())) for j, k in enumerate(dataset.schema.keys)}


def normalize(dataset: Dataset, bounds: Mapping[str, tuple[float, float]] | None = None) -> NormalizedDataset:
    """Scale every indicator to [0, 1] with (v - min) / (max - min).

    Bounds default to the global per-indicator extremes of ``dataset``. Passing
    ``bounds`` applies externally recorded extremes instead (e.g. a cached full
    dataset applied to a subset); results are clipped to [0, 1] in that case.
    A constant indicator maps to 0 with a ``DegenerateIndicatorWarning``.
    """
    if len(dataset) == 0:
        raise EmptyInput("cannot normalize an empty dataset")
    keys = dataset.schema.keys
    own = bounds is None
    bounds = dataset_bounds(dataset) if own else {k: (float(bounds[k][0]), float(bounds[k][1])) for k in keys}
    raw = dataset.matrix()
    out = np.zeros_like(raw)
    for j, key in enumerate(keys):
        lo, hi = bounds[key]
        if hi == lo:
            warnings.warn(f"indicator '{key}' is constant ({lo}); normalized to 0",
                          DegenerateIndicatorWarning, stacklevel=2)
            continue
        out[:, j] = (raw[:, j] - lo) / (hi - lo)
    if not own:
        np.clip(out, 0.0, 1.0, out=out)
    return NormalizedDataset(dataset.regions, out, bounds, dataset.schema)


@dataclass(frozen=True)
class BoxSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    outliers: tuple[tuple[str, float], ...]

    @property
    def fences(self) -> tuple[float, float]:
        iqr = self.q3 - self.q1
        return self.q1 - 1.5 * iqr, self.q3 + 1.5 * iqr


def box_stats(dataset: Dataset) -> dict[str, BoxSummary]:
    """Tukey five-number summary per indicator, 1.5*IQR outlier fences.

    Quartiles use linear interpolation between order statistics (numpy's
    default, "type 7").
    """
    if len(dataset) == 0:
        raise EmptyInput("cannot summarize an empty dataset")
    m = dataset.matrix()
    regions = dataset.regions
    stats = {}
    for j, key in enumerate(dataset.schema.keys):
        col = m[:, j]
        q1, med, q3 = np.percentile(col, [25, 50, 75])
        iqr = q3 - q1
        lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
        outliers = tuple((regions[i], float(v)) for i, v in enumerate(col) if v < lo or v > hi)
        stats[key] = BoxSummary(float(col.min()), float(q1), float(med), float(q3), float(col.max()), outliers)
    return stats


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    keys: tuple[str, ...]
    values: np.ndarray

    def __getitem__(self, pair: tuple[str, str]) -> float:
        a, b = pair
        return float(self.values[self.keys.index(a), self.keys.index(b)])


def pcc_matrix(dataset: Dataset) -> CorrelationMatrix:
    """Pairwise Pearson correlation between raw indicator columns."""
    if len(dataset) < 2:
        raise EmptyInput("need at least 2 regions for a correlation matrix")
    m = dataset.matrix()
    keys = dataset.schema.keys
    const = [k for j, k in enumerate(keys) if np.ptp(m[:, j]) == 0]
    if const:
        raise ConstantColumn(f"zero-variance indicator(s): {', '.join(const)}")
    c = np.corrcoef(m, rowvar=False)
    c = np.clip((c + c.T) / 2, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    c.setflags(write=False)
    return CorrelationMatrix(keys, c)


def pcc_to_csv(corr: CorrelationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["indicator", *corr.keys])
    for key, row in zip(corr.keys, corr.values):
        w.writerow([key, *(repr(float(v)) for v in row)])
    return buf.getvalue()


def box_stats_to_csv(stats: Mapping[str, BoxSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["indicator", "min", "q1", "median", "q3", "max", "n_outliers"])
    for key, s in stats.items():
        w.writerow([key, *(repr(v) for v in (s.min, s.q1, s.median, s.q3, s.max)), len(s.outliers)])
    return buf.getvalue()


def outliers_to_csv(stats: Mapping[str, BoxSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["indicator", "region", "value"])
    for key, s in stats.items():
        for region, v in s.outliers:
            w.writerow([key, region, repr(v)])
    return buf.getvalue()
