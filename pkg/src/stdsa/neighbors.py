"""First similarity filter: nearest regions on the normalized infection value."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import PTooLarge
from .preprocess import NormalizedDataset
from .schema import Dimension

DEFAULT_P = 8


@dataclass(frozen=True)
class NeighborSet:
    target: str
    neighbors: tuple[tuple[str, float], ...]

    @property
    def regions(self) -> tuple[str, ...]:
        return tuple(r for r, _ in self.neighbors)

    def __len__(self):
        return len(self.neighbors)


def _gamma_key(normalized: NormalizedDataset) -> str:
    (key,) = normalized.schema.keys_for(Dimension.GAMMA)
    return key


def infection_distances(normalized: NormalizedDataset, target: str) -> list[tuple[str, float]]:
    """Distance from ``target`` to every other region on the gamma indicator."""
    idx = normalized.index(target)
    col = normalized.column(_gamma_key(normalized))
    t = col[idx]
    return [(r, abs(float(v) - float(t))) for i, (r, v) in enumerate(zip(normalized.regions, col)) if i != idx]


def first_filter(normalized: NormalizedDataset, target: str, p: int = DEFAULT_P) -> NeighborSet:
    """The ``p`` regions closest to ``target`` in normalized infection.

    Exact sorted scan. Equal distances are ordered by region name.
    """
    if p < 1:
        raise PTooLarge(f"p must be a positive integer, got {p}")
    dists = infection_distances(normalized, target)
    if p > len(dists):
        raise PTooLarge(f"p={p} but only {len(dists)} other region(s) available")
    dists.sort(key=lambda rd: (rd[1], rd[0]))
    return NeighborSet(normalized.regions[normalized.index(target)], tuple(dists[:p]))


def neighbors_to_csv(sets) -> str:
    """One row per target: ``target,neighbor_1..neighbor_p``."""
    sets = list(sets)
    width = max((len(s) for s in sets), default=DEFAULT_P)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target", *(f"neighbor_{i}" for i in range(1, width + 1))])
    for s in sets:
        w.writerow([s.target, *s.regions])
    return buf.getvalue()
