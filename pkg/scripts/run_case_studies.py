#!/usr/bin/env python3
"""Second filter and metrics on the two published case-study similarity profiles.

Needs no raw data: the (alpha, beta) profiles are read from the test fixtures.
Prints the SSE curve, the chosen k, the recommended regions and both metrics
for every formula variant.

    python scripts/run_case_studies.py [--seed 42] [--restarts 20]
"""

import argparse
from itertools import product
from pathlib import Path

from stdsa.clustering import KMeansConfig, second_filter, second_filter_points
from stdsa.metrics import CONTRAST_VARIANTS, INTRINSIC_VARIANTS, contrast, intrinsic_dim
from stdsa.similarity import load_profile_csv

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
CASES = {"Sweden": "table5_sweden.csv", "Mainland China": "table5_mainland_china.csv"}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--restarts", type=int, default=20)
    args = ap.parse_args()
    config = KMeansConfig(seed=args.seed, restarts=args.restarts)

    for target, name in CASES.items():
        profile = load_profile_csv(FIXTURES / name, target)
        result, recommended = second_filter(profile, config)
        print(f"== {target}")
        print("  SSE: " + "  ".join(f"k={k}:{s:.4f}" for k, s in result.sse_curve))
        print(f"  chosen k = {result.chosen_k}; recommended: {', '.join(sorted(recommended)) or '(none)'}")
        points = second_filter_points(profile)
        for cv, iv in product(CONTRAST_VARIANTS, INTRINSIC_VARIANTS):
            print(f"  {cv:>8}/{iv:<5} contrast {contrast(points, cv):6.2f}  intrinsic dim {intrinsic_dim(points, iv):5.2f}")


if __name__ == "__main__":
    main()
