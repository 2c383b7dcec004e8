"""Indicator schema and the immutable region/dataset records."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidRecord, DuplicateRegion, UnknownRegion


class Dimension(enum.Enum):
    ALPHA = "alpha"  # basis of national epidemic prevention & control
    BETA = "beta"  # social resilience
    GAMMA = "gamma"  # infection situation


@dataclass(frozen=True)
class Indicator:
    key: str
    dimension: Dimension
    display_name: str


@dataclass(frozen=True)
class IndicatorSchema:
    indicators: tuple[Indicator, ...]

    def __post_init__(self):
        keys = [ind.key for ind in self.indicators]
        if len(set(keys)) != len(keys):
            raise InvalidRecord(f"duplicate indicator keys in schema: {keys}")

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(ind.key for ind in self.indicators)

    def keys_for(self, dimension: Dimension) -> tuple[str, ...]:
        return tuple(ind.key for ind in self.indicators if ind.dimension is dimension)

    def dimension_of(self, key: str) -> Dimension:
        for ind in self.indicators:
            if ind.key == key:
                return ind.dimension
        raise KeyError(key)


# Column order follows the published dataset table; it is also the CSV header order.
_DEFAULT_INDICATORS = (
    Indicator("infection", Dimension.GAMMA, "Infection (I)"),
    Indicator("government_risk_management", Dimension.ALPHA, "Government Risk Management (G)"),
    Indicator("emergency_preparedness", Dimension.ALPHA, "Emergency Preparedness (P)"),
    Indicator("care_quality_access", Dimension.ALPHA, "Quality and Accessibility of Care (Q)"),
    Indicator("education_level", Dimension.BETA, "Education Level (E)"),
    Indicator("young_distribution", Dimension.BETA, "Young Distribution (Y)"),
    Indicator("population_density", Dimension.BETA, "Population Density (P)"),
    Indicator("mass_living_level", Dimension.BETA, "Mass Living Level (M1)"),
    Indicator("monitoring_diagnosis", Dimension.ALPHA, "Monitoring and Diagnosis (M2)"),
)

_DEFAULT_SCHEMA = IndicatorSchema(_DEFAULT_INDICATORS)


def default_schema() -> IndicatorSchema:
    """The fixed 9-indicator schema: 4 alpha, 4 beta, 1 gamma."""
    return _DEFAULT_SCHEMA


def clean_region_name(name: str) -> str:
    return name.strip()


@dataclass(frozen=True)
class RegionRecord:
    region: str
    values: Mapping[str, float]
    schema: IndicatorSchema = field(default=_DEFAULT_SCHEMA, repr=False, compare=False)

    def __post_init__(self):
        region = clean_region_name(self.region)
        if not region:
            raise InvalidRecord("region name is empty")
        missing = [k for k in self.schema.keys if k not in self.values]
        if missing:
            raise InvalidRecord(f"{region}: missing indicators {missing}")
        vals = {k: float(self.values[k]) for k in self.schema.keys}
        for k, v in vals.items():
            if not math.isfinite(v):
                raise InvalidRecord(f"{region}: {k} is not finite ({v})")
        if "infection" in vals and not 0.0 <= vals["infection"] <= 1.0:
            raise InvalidRecord(f"{region}: infection {vals['infection']} outside [0, 1]")
        if "population_density" in vals and vals["population_density"] < 0:
            raise InvalidRecord(f"{region}: negative population_density")
        object.__setattr__(self, "region", region)
        object.__setattr__(self, "values", MappingProxyType(vals))

    def __eq__(self, other):
        if not isinstance(other, RegionRecord):
            return NotImplemented
        return self.region == other.region and dict(self.values) == dict(other.values)

    def __hash__(self):
        return hash((self.region, tuple(sorted(self.values.items()))))


@dataclass(frozen=True)
class Dataset:
    records: tuple[RegionRecord, ...]
    schema: IndicatorSchema = _DEFAULT_SCHEMA

    def __post_init__(self):
        records = tuple(self.records)
        names = [r.region for r in records]
        seen = set()
        for n in names:
            if n in seen:
                raise DuplicateRegion(f"region '{n}' appears more than once")
            seen.add(n)
        object.__setattr__(self, "records", records)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, Mapping[str, float]]],
                  schema: IndicatorSchema = _DEFAULT_SCHEMA) -> "Dataset":
        return cls(tuple(RegionRecord(name, vals, schema) for name, vals in rows), schema)

    def __len__(self):
        return len(self.records)

    @property
    def regions(self) -> tuple[str, ...]:
        return tuple(r.region for r in self.records)

    def record(self, region: str) -> RegionRecord:
        name = clean_region_name(region)
        for r in self.records:
            if r.region == name:
                return r
        raise UnknownRegion(f"unknown region '{name}'")

    def value(self, region: str, key: str) -> float:
        return self.record(region).values[key]

    def matrix(self, keys: Iterable[str] | None = None) -> np.ndarray:
        keys = tuple(keys) if keys is not None else self.schema.keys
        return np.array([[r.values[k] for k in keys] for r in self.records], dtype=float).reshape(len(self.records), len(keys))
