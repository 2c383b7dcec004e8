"""Per-dimension Pearson similarity between regions (user-based CF over indicators).

Regions play the role of users and a dimension's indicators the role of the
items both users rated. Each region is centred on its own mean over the
dimension's indicators before correlating.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, ZeroVariance, ZeroVarianceWarning, StdsaError
from .neighbors import NeighborSet
from .schema import Dimension


def pearson(a: Sequence[float], b: Sequence[float]) -> float:
    """Pearson correlation of two equal-length vectors, clipped to [-1, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"vectors differ in shape: {a.shape} vs {b.shape}")
    if a.size < 2:
        raise LengthMismatch("need at least 2 co-rated values")
    da = a - a.mean()
    db = b - b.mean()
    sa = math.sqrt(float(np.dot(da, da)))
    sb = math.sqrt(float(np.dot(db, db)))
    # an exactly constant vector still leaves rounding residue after centring
    if sa <= 1e-12 * max(1.0, float(np.abs(a).max())) or sb <= 1e-12 * max(1.0, float(np.abs(b).max())):
        raise ZeroVariance("vector is constant; correlation undefined")
    r = float(np.dot(da, db)) / (sa * sb)
    return min(1.0, max(-1.0, r))


def shared_indicators(data, i: str, j: str, dim: Dimension) -> tuple[str, ...]:
    """Indicators of ``dim`` that both regions carry.

    Datasets here are dense so this is the whole dimension; the intersection
    keeps sparse inputs (missing values encoded as NaN) working.
    """
    keys = data.schema.keys_for(dim)
    return tuple(k for k in keys
                 if math.isfinite(data.value(i, k)) and math.isfinite(data.value(j, k)))


def dimension_similarity(data, i: str, j: str, dim: Dimension) -> float:
    """Similarity of regions ``i`` and ``j`` on one dimension's indicators.

    ``data`` is a ``NormalizedDataset`` (default pipeline input) or a raw
    ``Dataset``; anything with ``schema`` and ``value(region, key)`` works.
    """
    if dim is Dimension.GAMMA:
        raise StdsaError("the infection dimension has a single indicator; use the first filter")
    keys = shared_indicators(data, i, j, dim)
    a = [data.value(i, k) for k in keys]
    b = [data.value(j, k) for k in keys]
    try:
        return pearson(a, b)
    except ZeroVariance:
        raise ZeroVariance(f"{dim.value}: '{i}' or '{j}' has constant values over {keys}") from None


@dataclass(frozen=True)
class SimilarityEntry:
    region: str
    sim_alpha: float
    sim_beta: float
    degenerate: bool = False


@dataclass(frozen=True)
class SimilarityProfile:
    target: str
    entries: tuple[SimilarityEntry, ...]

    @property
    def regions(self) -> tuple[str, ...]:
        return tuple(e.region for e in self.entries)

    def entry(self, region: str) -> SimilarityEntry:
        for e in self.entries:
            if e.region == region:
                return e
        raise KeyError(region)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_pairs(cls, target: str, pairs) -> "SimilarityProfile":
        """Build from ``{region: (sim_alpha, sim_beta)}`` or an iterable of triples."""
        items = pairs.items() if hasattr(pairs, "items") else ((r, (a, b)) for r, a, b in pairs)
        return cls(target, tuple(SimilarityEntry(r, float(a), float(b)) for r, (a, b) in items))


def similarity_profile(data, neighbors: NeighborSet) -> SimilarityProfile:
    """Alpha and beta similarity of the target to each first-filter neighbor.

    A neighbor whose similarity is undefined (constant values within a
    dimension) gets 0 for that dimension and ``degenerate=True``.
    """
    entries = []
    for region in neighbors.regions:
        sims = []
        bad = False
        for dim in (Dimension.ALPHA, Dimension.BETA):
            try:
                sims.append(dimension_similarity(data, neighbors.target, region, dim))
            except ZeroVariance as exc:
                warnings.warn(str(exc), ZeroVarianceWarning, stacklevel=2)
                sims.append(0.0)
                bad = True
        entries.append(SimilarityEntry(region, sims[0], sims[1], bad))
    return SimilarityProfile(neighbors.target, tuple(entries))


def profile_to_csv(profile: SimilarityProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["region", "national_base", "mass_base"])
    for e in profile.entries:
        w.writerow([e.region, repr(e.sim_alpha), repr(e.sim_beta)])
    return buf.getvalue()


def profile_matrix_csv(profile: SimilarityProfile) -> str:
    """Dimension-by-region matrix for heat-map plotting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dimension", *profile.regions])
    w.writerow(["alpha", *(repr(e.sim_alpha) for e in profile.entries)])
    w.writerow(["beta", *(repr(e.sim_beta) for e in profile.entries)])
    return buf.getvalue()


def load_profile_csv(path, target: str) -> SimilarityProfile:
    with open(Path(path), newline="", encoding="utf-8") as fh:
        rows = [(r["region"].strip(), float(r["national_base"]), float(r["mass_base"]))
                for r in csv.DictReader(fh)]
    return SimilarityProfile.from_pairs(target, rows)
