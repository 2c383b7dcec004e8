#!/usr/bin/env python3
"""Compare the contrast / intrinsic-dimension variants with the published case-study values.

    python scripts/calibrate_metrics.py [--within 0.10]
"""

import argparse
from pathlib import Path

from stdsa.clustering import second_filter_points
from stdsa.metrics import DEFAULT_CONTRAST, DEFAULT_INTRINSIC, calibrate, variant_table
from stdsa.similarity import load_profile_csv

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
# published (contrast, intrinsic dimension) per case
REFERENCE = {"Sweden": ("table5_sweden.csv", (15.20, 2.17)),
             "Mainland China": ("table5_mainland_china.csv", (2.02, 2.80))}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--within", type=float, default=0.10)
    args = ap.parse_args()

    cases = {name: (second_filter_points(load_profile_csv(FIXTURES / f, name)), ref)
             for name, (f, ref) in REFERENCE.items()}
    print(f"{'case':<16}{'contrast':>10}{'intrinsic':>11}{'C':>12}{'ID':>8}{'C ref':>8}{'ID ref':>8}")
    for name, cv, iv, c, i in variant_table(cases):
        ref = cases[name][1]
        print(f"{name:<16}{cv:>10}{iv:>11}{c:12.2f}{i:8.2f}{ref[0]:8.2f}{ref[1]:8.2f}")

    cal = calibrate(cases, args.within)
    print(f"\nbest: contrast={cal.contrast_variant} intrinsic={cal.intrinsic_variant} "
          f"worst relative error {cal.worst:.1%} ({'within' if cal.passed else 'outside'} {args.within:.0%})")
    for name, (ec, ei) in cal.residuals.items():
        print(f"  {name}: contrast {ec:+.1%}, intrinsic dim {ei:+.1%}")
    frozen = (DEFAULT_CONTRAST, DEFAULT_INTRINSIC) == (cal.contrast_variant, cal.intrinsic_variant)
    print(f"package defaults {DEFAULT_CONTRAST}/{DEFAULT_INTRINSIC} {'match' if frozen else 'DO NOT match'} the best variants")


if __name__ == "__main__":
    main()
