"""Lloyd's k-means with seeded k-means++ restarts, elbow selection, and the
two clustering stages built on it (second similarity filter, full-data baseline)."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import CurveTooShort, DimensionMismatch, EmptyInput, KTooLarge, StdsaError, UnknownRegion
from .preprocess import NormalizedDataset
from .similarity import SimilarityProfile

AUTO = "auto"
DEFAULT_BASELINE_K = 5
DEFAULT_K_MAX = 8
# target's self-similarity in both dimensions
TARGET_POINT = (1.0, 1.0)
ELBOW_METHODS = ("gain", "second_difference")


@dataclass(frozen=True)
class KMeansConfig:
    k: int | str = AUTO
    max_iterations: int = 300
    restarts: int = 20
    seed: int = 42
    tolerance: float = 1e-6
    k_max: int | None = None
    elbow_method: str = "gain"
    elbow_threshold: float = 0.1

    def __post_init__(self):
        if self.k != AUTO and (not isinstance(self.k, (int, np.integer)) or self.k < 1):
            raise StdsaError(f"k must be a positive integer or '{AUTO}', got {self.k!r}")
        if self.max_iterations < 1 or self.restarts < 1:
            raise StdsaError("max_iterations and restarts must be positive")
        if not self.tolerance > 0:
            raise StdsaError("tolerance must be > 0")
        if self.elbow_method not in ELBOW_METHODS:
            raise StdsaError(f"unknown elbow method {self.elbow_method!r}")


@dataclass(frozen=True, eq=False)
class ClusterResult:
    ids: tuple[str, ...]
    labels: np.ndarray
    centroids: np.ndarray
    sse: float
    sse_curve: tuple[tuple[int, float], ...]
    chosen_k: int
    iterations_run: int
    seed: int
    # SSE after every update step of the winning run
    sse_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def assignments(self) -> dict[str, int]:
        return {i: int(c) for i, c in zip(self.ids, self.labels)}

    def cluster_of(self, point_id: str) -> int:
        try:
            return int(self.labels[self.ids.index(point_id)])
        except ValueError:
            raise UnknownRegion(f"unknown point '{point_id}'") from None

    def members(self, cluster: int) -> tuple[str, ...]:
        return tuple(i for i, c in zip(self.ids, self.labels) if c == cluster)

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.chosen_k).tolist()

    def to_dict(self) -> dict:
        return {
            "chosen_k": self.chosen_k,
            "seed": self.seed,
            "sse": self.sse,
            "iterations_run": self.iterations_run,
            "sse_curve": [[k, s] for k, s in self.sse_curve],
            "assignments": self.assignments,
            "centroids": self.centroids.tolist(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["region", "cluster"])
        for i, c in zip(self.ids, self.labels):
            w.writerow([i, int(c)])
        return buf.getvalue()


def curve_to_csv(curve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "sse"])
    for k, s in curve:
        w.writerow([k, repr(float(s))])
    return buf.getvalue()


def _as_points(points) -> np.ndarray:
    try:
        X = np.asarray(points, dtype=float)
    except ValueError as exc:
        raise DimensionMismatch(f"points have inconsistent dimensions: {exc}") from None
    if X.size == 0:
        raise EmptyInput("no points to cluster")
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D array of points, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise StdsaError("points must be finite")
    return X


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _means(X: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    C = np.zeros((k, X.shape[1]))
    for c in range(k):
        C[c] = X[labels == c].mean(axis=0)
    return C


def sse_of(X: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    return float(((X - centroids[labels]) ** 2).sum())


def _rng(seed: int, k: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed % 2**64, spawn_key=(k, restart)))


def kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    idx = [int(rng.integers(n))]
    d2 = ((X - X[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        nxt = int(rng.integers(n)) if total <= 0 else int(rng.choice(n, p=d2 / total))
        idx.append(nxt)
        d2 = np.minimum(d2, ((X - X[nxt]) ** 2).sum(axis=1))
    return X[idx].copy()


def _repair_empty(X, labels, dists, k):
    """Give each empty cluster the point farthest from its own centroid."""
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        own = dists[np.arange(len(X)), labels]
        own = np.where(counts[labels] > 1, own, -np.inf)
        p = int(np.argmax(own))
        counts[labels[p]] -= 1
        labels[p] = c
        counts[c] = 1
    return labels


def _lloyd(X, C, max_iterations, tolerance):
    k = len(C)
    labels = None
    history = []
    iterations = 0
    for _ in range(max_iterations):
        D = _sq_dists(X, C)
        new = np.argmin(D, axis=1)
        new = _repair_empty(X, new, D, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        newC = _means(X, labels, k)
        iterations += 1
        history.append(sse_of(X, labels, newC))
        shift = float(np.sqrt(((newC - C) ** 2).sum(axis=1)).max())
        C = newC
        if shift < tolerance:
            break
    return labels, C, iterations, history


@dataclass
class _Fit:
    labels: np.ndarray
    centroids: np.ndarray
    sse: float
    iterations: int
    history: list


def _fit_k(X, k, config: KMeansConfig, warm: Sequence[np.ndarray] = ()) -> _Fit:
    best = None
    inits = [kmeans_plusplus(X, k, _rng(config.seed, k, r)) for r in range(config.restarts)]
    for init in [*inits, *warm]:
        labels, C, its, hist = _lloyd(X, init, config.max_iterations, config.tolerance)
        sse = sse_of(X, labels, C)
        if best is None or sse < best.sse:
            best = _Fit(labels, C, sse, its, hist)
    return best


def _split_start(X, fit: _Fit) -> np.ndarray:
    """Previous centroids plus the point farthest from its centroid."""
    own = ((X - fit.centroids[fit.labels]) ** 2).sum(axis=1)
    return np.vstack([fit.centroids, X[int(np.argmax(own))]])


def _fit_range(X, k_top, config):
    fits = {}
    for k in range(1, k_top + 1):
        warm = [_split_start(X, fits[k - 1])] if k > 1 else []
        fits[k] = _fit_k(X, k, config, warm)
    return fits


def _default_k_max(n: int, config: KMeansConfig) -> int:
    return config.k_max if config.k_max is not None else min(DEFAULT_K_MAX, n - 1)


def sse_curve(points, k_max: int, config: KMeansConfig = KMeansConfig()) -> list[tuple[int, float]]:
    """Best-of-restarts SSE for k = 1..k_max.

    Every k > 1 also starts once from the (k-1) solution plus a split, so the
    curve can never increase.
    """
    X = _as_points(points)
    if k_max < 1 or k_max > len(X):
        raise KTooLarge(f"k_max={k_max} with {len(X)} points")
    fits = _fit_range(X, k_max, config)
    return [(k, fits[k].sse) for k in range(1, k_max + 1)]


def _second_difference_k(ks, sse):
    best_k, best = None, -np.inf
    scale = max(abs(sse[0]), 1e-300)
    for i in range(1, len(ks) - 1):
        d2 = (sse[i - 1] - sse[i]) - (sse[i] - sse[i + 1])
        if d2 > best + 1e-12 * scale:
            best_k, best = ks[i], d2
    return best_k


def _gain_k(ks, sse, threshold):
    total = sse[0]
    for i in range(1, len(ks) - 1):
        if sse[i] - sse[i + 1] < threshold * total:
            return ks[i]
    return _second_difference_k(ks, sse)


def choose_k_elbow(curve, method: str = "gain", threshold: float = 0.1) -> int:
    """Pick the k at which the SSE descent flattens.

    ``gain``: the smallest interior k whose next step (k -> k+1) removes less
    than ``threshold`` of the single-cluster SSE; falls back to the
    second-difference rule when no step is that small.
    ``second_difference``: the interior k maximizing
    (sse[k-1] - sse[k]) - (sse[k] - sse[k+1]); ties go to the smallest k.
    """
    pts = sorted((int(k), float(s)) for k, s in curve)
    ks = [k for k, _ in pts]
    if len(ks) < 3 or ks != list(range(1, len(ks) + 1)):
        raise CurveTooShort(f"need a curve over k = 1..k_max with k_max >= 3, got k = {ks}")
    sse = [s for _, s in pts]
    if method == "second_difference":
        return _second_difference_k(ks, sse)
    if method == "gain":
        return _gain_k(ks, sse, threshold)
    raise StdsaError(f"unknown elbow method {method!r}")


def kmeans(points, config: KMeansConfig = KMeansConfig(), ids: Sequence[str] | None = None) -> ClusterResult:
    """Cluster ``points``; ``config.k == AUTO`` picks k from the elbow of the SSE curve."""
    X = _as_points(points)
    n = len(X)
    ids = tuple(ids) if ids is not None else tuple(str(i) for i in range(n))
    if len(ids) != n:
        raise DimensionMismatch(f"{len(ids)} ids for {n} points")

    if config.k == AUTO:
        k_max = _default_k_max(n, config)
        if k_max < 3:
            raise CurveTooShort(f"{n} points are too few to choose k automatically")
        fits = _fit_range(X, k_max, config)
        curve = tuple((k, fits[k].sse) for k in range(1, k_max + 1))
        k = choose_k_elbow(curve, config.elbow_method, config.elbow_threshold)
    else:
        k = int(config.k)
        if k > n:
            raise KTooLarge(f"k={k} exceeds the {n} points")
        if config.k_max is not None:
            if config.k_max > n:
                raise KTooLarge(f"k_max={config.k_max} exceeds the {n} points")
            fits = _fit_range(X, max(k, config.k_max), config)
            curve = tuple((kk, fits[kk].sse) for kk in range(1, config.k_max + 1))
        else:
            fits = {k: _fit_k(X, k, config)}
            curve = ((k, fits[k].sse),)

    fit = fits[k]
    centroids = fit.centroids.copy()
    centroids.setflags(write=False)
    labels = fit.labels.copy()
    labels.setflags(write=False)
    return ClusterResult(ids, labels, centroids, fit.sse, curve, k, fit.iterations,
                         config.seed, tuple(fit.history))


def second_filter(profile: SimilarityProfile, config: KMeansConfig = KMeansConfig()) -> tuple[ClusterResult, frozenset[str]]:
    """Cluster (sim_alpha, sim_beta) of the neighbors together with the target at (1, 1).

    Returns the clustering and the neighbors sharing the target's cluster.
    Entries are clustered in region-name order so the outcome does not
    depend on the order of ``profile.entries``.
    """
    if len(profile) < 3:
        raise EmptyInput(f"second filter needs at least 3 neighbors, got {len(profile)}")
    entries = sorted(profile.entries, key=lambda e: e.region)
    ids = [e.region for e in entries] + [profile.target]
    points = [(e.sim_alpha, e.sim_beta) for e in entries] + [TARGET_POINT]
    result = kmeans(points, config, ids)
    return result, _same_cluster(result, profile.target)


def second_filter_points(profile: SimilarityProfile) -> np.ndarray:
    """The clustered points of the second filter, target last."""
    entries = sorted(profile.entries, key=lambda e: e.region)
    return np.array([(e.sim_alpha, e.sim_beta) for e in entries] + [TARGET_POINT])


def baseline_kmeans(normalized: NormalizedDataset, target: str, k: int = DEFAULT_BASELINE_K,
                    config: KMeansConfig = KMeansConfig()) -> tuple[ClusterResult, frozenset[str]]:
    """Plain k-means over every region's full normalized indicator vector."""
    target = normalized.regions[normalized.index(target)]
    n = len(normalized)
    k_max = config.k_max if config.k_max is not None else min(DEFAULT_K_MAX, n - 1)
    cfg = replace(config, k=k, k_max=k_max if k_max >= 1 else None)
    result = kmeans(normalized.matrix, cfg, normalized.regions)
    return result, _same_cluster(result, target)


def _same_cluster(result: ClusterResult, target: str) -> frozenset[str]:
    c = result.cluster_of(target)
    return frozenset(r for r in result.members(c) if r != target)
