"""Contrast and intrinsic dimensionality of a clustered point set.

Both are scale-free statistics of the pairwise Euclidean distances:

* contrast -- per point, how much farther its furthest neighbor is than its
  nearest one, averaged over points. ``relative`` uses (far - near) / near,
  ``ratio`` uses far / near.
* intrinsic dimension -- mean(D)^2 / (2 var(D)) over all pairwise distances D
  (``half``), or mean(D)^2 / var(D) (``plain``).

The defaults are the variants closest to the published case-study values,
see ``calibrate``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product
from typing import Mapping

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import CoincidentPointsWarning, DegenerateGeometry, StdsaError

CONTRAST_VARIANTS = ("relative", "ratio")
INTRINSIC_VARIANTS = ("half", "plain")
DEFAULT_CONTRAST = "relative"
DEFAULT_INTRINSIC = "half"


@dataclass(frozen=True)
class MetricsReport:
    contrast: float
    intrinsic_dim: float
    contrast_variant: str = DEFAULT_CONTRAST
    intrinsic_variant: str = DEFAULT_INTRINSIC

    def to_dict(self) -> dict:
        return {
            "contrast": self.contrast,
            "intrinsic_dim": self.intrinsic_dim,
            "contrast_variant": self.contrast_variant,
            "intrinsic_variant": self.intrinsic_variant,
        }


def _check(points) -> np.ndarray:
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or len(X) < 3:
        raise DegenerateGeometry("need at least 3 points")
    if not np.all(np.isfinite(X)):
        raise StdsaError("points must be finite")
    return X


def contrast(points, variant: str = DEFAULT_CONTRAST) -> float:
    """Mean over points of the nearest/furthest neighbor spread.

    Coincident points are ignored when looking for a point's nearest
    neighbor (with a warning); a point with no distinct neighbor at all makes
    the statistic undefined.
    """
    if variant not in CONTRAST_VARIANTS:
        raise StdsaError(f"unknown contrast variant {variant!r}")
    X = _check(points)
    D = squareform(pdist(X))
    n = len(X)
    off = ~np.eye(n, dtype=bool)
    if np.any(D[off] == 0):
        warnings.warn("coincident points excluded from nearest-neighbor distances",
                      CoincidentPointsWarning, stacklevel=2)
    far = D.max(axis=1)
    near = np.where(off & (D > 0), D, np.inf).min(axis=1)
    if not np.all(np.isfinite(near)):
        raise DegenerateGeometry("a point has no distinct neighbor")
    if variant == "relative":
        return float(np.mean((far - near) / near))
    return float(np.mean(far / near))


def intrinsic_dim(points, variant: str = DEFAULT_INTRINSIC) -> float:
    """Distance-distribution estimate of dimensionality from all pairwise distances."""
    if variant not in INTRINSIC_VARIANTS:
        raise StdsaError(f"unknown intrinsic-dimension variant {variant!r}")
    d = pdist(_check(points))
    mu = d.mean()
    var = d.var()
    if var <= 1e-12 * mu * mu:
        raise DegenerateGeometry("pairwise distances have zero variance")
    return float(mu * mu / (2 * var if variant == "half" else var))


def metrics(points, contrast_variant: str = DEFAULT_CONTRAST,
            intrinsic_variant: str = DEFAULT_INTRINSIC) -> MetricsReport:
    return MetricsReport(contrast(points, contrast_variant), intrinsic_dim(points, intrinsic_variant),
                         contrast_variant, intrinsic_variant)


@dataclass(frozen=True)
class Calibration:
    contrast_variant: str
    intrinsic_variant: str
    # case -> (contrast rel. error, intrinsic rel. error)
    residuals: dict
    within: float

    @property
    def worst(self) -> float:
        return max(abs(e) for pair in self.residuals.values() for e in pair)

    @property
    def passed(self) -> bool:
        return self.worst <= self.within


def calibrate(cases: Mapping[str, tuple], within: float = 0.10) -> Calibration:
    """Choose the variant pair that best reproduces reference values.

    ``cases`` maps a name to ``(points, (contrast_ref, intrinsic_ref))``. Each
    statistic is chosen independently, minimizing the worst relative error
    across cases; ties keep the earlier (default-first) variant.
    """
    def worst(fn, variant, which):
        errs = []
        for points, refs in cases.values():
            errs.append(fn(points, variant) / refs[which] - 1.0)
        return max(abs(e) for e in errs)

    cv = min(CONTRAST_VARIANTS, key=lambda v: worst(contrast, v, 0))
    iv = min(INTRINSIC_VARIANTS, key=lambda v: worst(intrinsic_dim, v, 1))
    residuals = {}
    for name, (points, (c_ref, i_ref)) in cases.items():
        residuals[name] = (contrast(points, cv) / c_ref - 1.0, intrinsic_dim(points, iv) / i_ref - 1.0)
    return Calibration(cv, iv, residuals, within)


def variant_table(cases: Mapping[str, tuple]) -> list[tuple[str, str, str, float, float]]:
    """Every (case, contrast variant, intrinsic variant) combination with its values."""
    rows = []
    for name, (points, _) in cases.items():
        for cv, iv in product(CONTRAST_VARIANTS, INTRINSIC_VARIANTS):
            rows.append((name, cv, iv, contrast(points, cv), intrinsic_dim(points, iv)))
    return rows
