#!/usr/bin/env python3
"""Full two-stage run plus the k-means baseline for one or more targets.

    python scripts/run_pipeline.py --dataset data/stdsa_dataset.csv Sweden "Mainland China"

The dataset defaults to $STDSA_DATASET, then data/stdsa_dataset.csv. With
only the ten-row sample (data/table2_sample.csv) use p <= 9.
"""

import argparse
import os
import sys
from pathlib import Path

from stdsa import load_csv, run_stdsa
from stdsa.clustering import KMeansConfig
from stdsa.errors import StdsaError

DEFAULT = Path(__file__).resolve().parents[1] / "data" / "stdsa_dataset.csv"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("targets", nargs="+")
    ap.add_argument("--dataset", default=os.environ.get("STDSA_DATASET") or str(DEFAULT))
    ap.add_argument("--p", type=int, default=8)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--similarity-input", choices=("normalized", "raw"), default="normalized")
    ap.add_argument("--json", action="store_true", help="print the full JSON report instead of the summary")
    args = ap.parse_args()

    if not Path(args.dataset).exists():
        sys.exit(f"dataset not found: {args.dataset}")
    dataset, report = load_csv(args.dataset)
    print(f"# {report.rows_accepted}/{report.rows_read} rows accepted from {args.dataset}", file=sys.stderr)
    for target in args.targets:
        try:
            rep = run_stdsa(dataset, target, p=args.p, config=KMeansConfig(seed=args.seed),
                            similarity_input=args.similarity_input)
        except StdsaError as exc:
            print(f"{target}: {exc}", file=sys.stderr)
            continue
        sys.stdout.write(rep.to_json() if args.json else rep.to_text() + "\n")


if __name__ == "__main__":
    main()
