"""End-to-end run: normalize -> first filter -> similarity -> second filter ->
metrics, plus the plain k-means baseline for comparison."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from .clustering import (AUTO, DEFAULT_BASELINE_K, ClusterResult, KMeansConfig, baseline_kmeans,
                         second_filter, second_filter_points)
from .errors import PipelineError, StdsaError
from .ingest import dataset_checksum
from .metrics import DEFAULT_CONTRAST, DEFAULT_INTRINSIC, MetricsReport, metrics
from .neighbors import DEFAULT_P, NeighborSet, first_filter
from .preprocess import NormalizedDataset, normalize
from .schema import Dataset
from .similarity import SimilarityProfile, similarity_profile

SIMILARITY_INPUTS = ("normalized", "raw")


@dataclass(frozen=True, eq=False)
class RecommendationReport:
    target: str
    neighbor_set: NeighborSet
    profile: SimilarityProfile
    stdsa_recommended: frozenset[str]
    baseline_recommended: frozenset[str]
    metrics: MetricsReport
    parameters: dict
    provenance: dict
    second_filter: ClusterResult = field(repr=False)
    baseline: ClusterResult = field(repr=False)
    normalized: NormalizedDataset = field(repr=False)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "parameters": self.parameters,
            "provenance": self.provenance,
            "neighbors": [{"region": r, "distance": d} for r, d in self.neighbor_set.neighbors],
            "profile": [{"region": e.region, "sim_alpha": e.sim_alpha, "sim_beta": e.sim_beta,
                         "degenerate": e.degenerate} for e in self.profile.entries],
            "stdsa_recommended": sorted(self.stdsa_recommended),
            "baseline_recommended": sorted(self.baseline_recommended),
            "metrics": self.metrics.to_dict(),
            "second_filter": self.second_filter.to_dict(),
            "baseline": {**self.baseline.to_dict(), "cluster_sizes": self.baseline.sizes()},
            "comparison": compare(self).to_dict(),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        cmp = compare(self)
        lines = [
            f"Target region: {self.target}",
            f"First filter (p={self.parameters['p']}): " + ", ".join(self.neighbor_set.regions),
            "Similarity (alpha / beta):",
        ]
        lines += [f"  {e.region:<32} {e.sim_alpha:6.2f} {e.sim_beta:6.2f}" for e in self.profile.entries]
        lines += [
            f"Second filter: k={self.parameters['chosen_k']}, SSE={self.second_filter.sse:.4f}",
            "Recommended: " + (", ".join(sorted(self.stdsa_recommended)) or "(none)"),
            f"Baseline k-means (k={self.parameters['baseline_k']}): {cmp.baseline_count} region(s) "
            f"share the target's cluster; sizes {sorted(self.baseline.sizes(), reverse=True)}",
            f"Recommended regions inside baseline cluster: {cmp.intersection_count}/{cmp.stdsa_count}"
            f" (contained: {cmp.contained})",
            f"Contrast: {self.metrics.contrast:.2f} ({self.metrics.contrast_variant}), "
            f"intrinsic dim: {self.metrics.intrinsic_dim:.2f} ({self.metrics.intrinsic_variant})",
            f"Dataset sha256: {self.provenance['dataset_sha256']}",
        ]
        lines += [f"Note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ComparisonSummary:
    stdsa_count: int
    baseline_count: int
    intersection: tuple[str, ...]
    contained: bool

    @property
    def intersection_count(self) -> int:
        return len(self.intersection)

    def to_dict(self) -> dict:
        return {"stdsa_count": self.stdsa_count, "baseline_count": self.baseline_count,
                "intersection": list(self.intersection), "contained": self.contained}


def compare(report) -> ComparisonSummary:
    """Overlap between the two-stage recommendation and the baseline cluster."""
    s, b = set(report.stdsa_recommended), set(report.baseline_recommended)
    return ComparisonSummary(len(s), len(b), tuple(sorted(s & b)), s <= b)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StdsaError as exc:
        raise PipelineError(name, exc) from exc


def run_stdsa(dataset: Dataset, target: str, p: int = DEFAULT_P, k=AUTO,
              config: KMeansConfig = KMeansConfig(), baseline_k: int = DEFAULT_BASELINE_K,
              contrast_variant: str = DEFAULT_CONTRAST, intrinsic_variant: str = DEFAULT_INTRINSIC,
              similarity_input: str = "normalized", timestamp: str | None = None) -> RecommendationReport:
    if similarity_input not in SIMILARITY_INPUTS:
        raise StdsaError(f"similarity_input must be one of {SIMILARITY_INPUTS}")
    if len(dataset) < p + 1:
        raise PipelineError("ingest", StdsaError(f"dataset has {len(dataset)} region(s); p={p} needs at least {p + 1}"))

    normalized = _stage("normalize", normalize, dataset)
    neighbors = _stage("first_filter", first_filter, normalized, target, p)
    source = normalized if similarity_input == "normalized" else dataset
    profile = _stage("similarity", similarity_profile, source, neighbors)
    sf_config = replace(config, k=k)
    sf_result, recommended = _stage("second_filter", second_filter, profile, sf_config)
    mrep = _stage("metrics", metrics, second_filter_points(profile), contrast_variant, intrinsic_variant)
    base_result, base_recommended = _stage("baseline", baseline_kmeans, normalized, neighbors.target,
                                           baseline_k, replace(config, k=baseline_k))

    notes = [f"{e.region}: constant values in a dimension, similarity set to 0"
             for e in profile.entries if e.degenerate]
    parameters = {
        "p": p,
        "k": k,
        "chosen_k": sf_result.chosen_k,
        "baseline_k": baseline_k,
        "seed": config.seed,
        "restarts": config.restarts,
        "elbow_method": config.elbow_method,
        "contrast_variant": contrast_variant,
        "intrinsic_variant": intrinsic_variant,
        "similarity_input": similarity_input,
    }
    provenance = {
        "dataset_sha256": dataset_checksum(dataset),
        "regions": len(dataset),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return RecommendationReport(neighbors.target, neighbors, profile, recommended, base_recommended, mrep,
                                parameters, provenance, sf_result, base_result, normalized, tuple(notes))
