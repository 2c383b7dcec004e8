"""Command-line front end.

    stdsa ingest    --dataset data.csv
    stdsa stats     --dataset data.csv [--indicator population_density]
    stdsa recommend --dataset data.csv --target Sweden [--p 8 --k auto --seed 42]
    stdsa baseline  --dataset data.csv --target Sweden [--baseline-k 5]
    stdsa metrics   --dataset data.csv --target Sweden | --profile profile.csv --target Sweden

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import __version__
from .clustering import AUTO, KMeansConfig, baseline_kmeans, curve_to_csv, second_filter, second_filter_points, sse_curve
from .errors import PipelineError, StdsaError
from .ingest import load_csv, save_normalized
from .metrics import CONTRAST_VARIANTS, DEFAULT_CONTRAST, DEFAULT_INTRINSIC, INTRINSIC_VARIANTS, metrics
from .neighbors import first_filter, neighbors_to_csv
from .pipeline import run_stdsa
from .preprocess import box_stats, box_stats_to_csv, normalize, outliers_to_csv, pcc_matrix, pcc_to_csv
from .similarity import load_profile_csv, profile_matrix_csv, profile_to_csv, similarity_profile

log = logging.getLogger("stdsa")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
FORMATS = ("json", "csv", "text")
ENV_DATASET = "STDSA_DATASET"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    dataset_path: str | None = None
    output_dir: str = "stdsa_output"
    p: int = 8
    k: int | str = AUTO
    baseline_k: int = 5
    seed: int = 42
    restarts: int = 20
    format: str = "json"


def _parse_k(value) -> int | str:
    if str(value).strip().lower() == AUTO:
        return AUTO
    try:
        k = int(value)
    except ValueError:
        raise UsageError(f"k must be a positive integer or '{AUTO}', got {value!r}") from None
    if k < 1:
        raise UsageError(f"k must be positive, got {k}")
    return k


def _positive_int(name, value) -> int:
    try:
        v = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be an integer, got {value!r}") from None
    if v < 1 and name != "seed":
        raise UsageError(f"{name} must be positive, got {v}")
    return v


def read_config_file(path) -> dict[str, str]:
    """``key=value`` lines; ``#`` starts a comment. Keys may use '-' or '_'."""
    out = {}
    known = {f.name for f in fields(CliConfig)}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "dataset":
            key = "dataset_path"
        if key not in known:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_config(args) -> CliConfig:
    """Defaults < config file < command-line flags; STDSA_DATASET fills a missing dataset."""
    values: dict = {}
    if getattr(args, "config", None):
        try:
            values.update(read_config_file(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    flag_map = {"dataset_path": "dataset", "output_dir": "output_dir", "p": "p", "k": "k",
                "baseline_k": "baseline_k", "seed": "seed", "restarts": "restarts", "format": "format"}
    for key, attr in flag_map.items():
        v = getattr(args, attr, None)
        if v is not None:
            values[key] = v
    if not values.get("dataset_path") and os.environ.get(ENV_DATASET):
        values["dataset_path"] = os.environ[ENV_DATASET]

    cfg = CliConfig()
    for key in ("p", "baseline_k", "seed", "restarts"):
        if key in values:
            values[key] = _positive_int(key, values[key])
    if "k" in values:
        values["k"] = _parse_k(values["k"])
    if "baseline_k" in values:
        values["baseline_k"] = _parse_k(values["baseline_k"])
    if values.get("format", cfg.format) not in FORMATS:
        raise UsageError(f"format must be one of {', '.join(FORMATS)}")
    return replace(cfg, **values)


def _parse_metric_variant(value: str | None) -> tuple[str, str]:
    if value is None or value == "calibrated":
        return DEFAULT_CONTRAST, DEFAULT_INTRINSIC
    parts = value.split(":")
    if len(parts) != 2 or parts[0] not in CONTRAST_VARIANTS or parts[1] not in INTRINSIC_VARIANTS:
        raise UsageError(f"--metric-variant expects CONTRAST:INTRINSIC with CONTRAST in {CONTRAST_VARIANTS} "
                         f"and INTRINSIC in {INTRINSIC_VARIANTS}, got {value!r}")
    return parts[0], parts[1]


def _kmeans_config(cfg: CliConfig) -> KMeansConfig:
    return KMeansConfig(seed=cfg.seed, restarts=cfg.restarts)


def _load(cfg: CliConfig):
    if not cfg.dataset_path:
        raise UsageError(f"no dataset given (use --dataset, a config file, or ${ENV_DATASET})")
    dataset, report = load_csv(cfg.dataset_path)
    for line, reason in report.rejects:
        log.warning("%s:%d rejected: %s", cfg.dataset_path, line, reason)
    return dataset, report


def _out_dir(cfg: CliConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="")
    log.info("wrote %s", path)


def cmd_ingest(args) -> int:
    cfg = resolve_config(args)
    dataset, report = _load(cfg)
    if len(dataset):
        save_normalized(normalize(dataset), _out_dir(cfg) / "normalized.csv")
    if cfg.format == "json":
        print(json.dumps({"rows_read": report.rows_read, "rows_accepted": report.rows_accepted,
                          "rejects": [{"line": ln, "reason": r} for ln, r in report.rejects]}, indent=2))
    elif cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["line", "reason"])
        w.writerows(report.rejects)
        sys.stdout.write(buf.getvalue())
    else:
        print(report)
    return EXIT_OK


def cmd_stats(args) -> int:
    cfg = resolve_config(args)
    dataset, _ = _load(cfg)
    stats = box_stats(dataset)
    if args.indicator is not None and args.indicator not in stats:
        raise UsageError(f"unknown indicator {args.indicator!r}; choose from {', '.join(stats)}")
    out = _out_dir(cfg)
    _write(out / "box_stats.csv", box_stats_to_csv(stats))
    _write(out / "outliers.csv", outliers_to_csv(stats))
    _write(out / "pcc_matrix.csv", pcc_to_csv(pcc_matrix(dataset)))
    n = len(dataset)
    curve = sse_curve(normalize(dataset).matrix, min(8, n - 1) if n > 1 else 1, _kmeans_config(cfg))
    _write(out / "elbow_curve.csv", curve_to_csv(curve))

    selected = {args.indicator: stats[args.indicator]} if args.indicator else stats
    if cfg.format == "csv":
        sys.stdout.write(outliers_to_csv(selected))
    elif cfg.format == "json":
        print(json.dumps({k: {**{f: getattr(s, f) for f in ("min", "q1", "median", "q3", "max")},
                              "outliers": [{"region": r, "value": v} for r, v in s.outliers]}
                          for k, s in selected.items()}, indent=2))
    else:
        for key, s in selected.items():
            names = ", ".join(r for r, _ in s.outliers) or "none"
            print(f"{key}: min={s.min:g} q1={s.q1:g} median={s.median:g} q3={s.q3:g} max={s.max:g}; outliers: {names}")
    return EXIT_OK


def cmd_recommend(args) -> int:
    cfg = resolve_config(args)
    if not args.target:
        raise UsageError("--target is required")
    cv, iv = _parse_metric_variant(args.metric_variant)
    dataset, _ = _load(cfg)
    report = run_stdsa(dataset, args.target, p=cfg.p, k=cfg.k, config=_kmeans_config(cfg),
                       baseline_k=cfg.baseline_k, contrast_variant=cv, intrinsic_variant=iv,
                       similarity_input=args.similarity_input)
    out = _out_dir(cfg)
    _write(out / "report.json", report.to_json())
    _write(out / "report.txt", report.to_text())
    rec_csv = _recommendations_csv(report)
    _write(out / "recommendations.csv", rec_csv)
    if args.keep_intermediate:
        save_normalized(report.normalized, out / "normalized.csv")
        _write(out / "neighbors.csv", neighbors_to_csv([report.neighbor_set]))
        _write(out / "profile.csv", profile_to_csv(report.profile))
        _write(out / "profile_matrix.csv", profile_matrix_csv(report.profile))
        _write(out / "second_filter_clusters.csv", report.second_filter.to_csv())
        _write(out / "second_filter_elbow.csv", curve_to_csv(report.second_filter.sse_curve))
        _write(out / "baseline_clusters.csv", report.baseline.to_csv())
        _write(out / "baseline_elbow.csv", curve_to_csv(report.baseline.sse_curve))
    if cfg.format == "json":
        sys.stdout.write(report.to_json())
    elif cfg.format == "csv":
        sys.stdout.write(rec_csv)
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK


def _recommendations_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["region", "method"])
    for r in sorted(report.stdsa_recommended):
        w.writerow([r, "stdsa"])
    for r in sorted(report.baseline_recommended):
        w.writerow([r, "baseline"])
    return buf.getvalue()


def cmd_baseline(args) -> int:
    cfg = resolve_config(args)
    if not args.target:
        raise UsageError("--target is required")
    dataset, _ = _load(cfg)
    try:
        normalized = normalize(dataset)
        result, recommended = baseline_kmeans(normalized, args.target, cfg.baseline_k,
                                              replace(_kmeans_config(cfg), k=cfg.baseline_k))
    except StdsaError as exc:
        raise PipelineError("baseline", exc) from exc
    out = _out_dir(cfg)
    _write(out / "baseline_clusters.csv", result.to_csv())
    _write(out / "baseline_elbow.csv", curve_to_csv(result.sse_curve))
    payload = {**result.to_dict(), "target": args.target, "cluster_sizes": result.sizes(),
               "recommended": sorted(recommended)}
    _write(out / "baseline.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if cfg.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif cfg.format == "csv":
        sys.stdout.write(result.to_csv())
    else:
        print(f"k={result.chosen_k} sizes={result.sizes()}")
        print(f"{len(recommended)} region(s) share {args.target}'s cluster: {', '.join(sorted(recommended))}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    cfg = resolve_config(args)
    if not args.target:
        raise UsageError("--target is required")
    cv, iv = _parse_metric_variant(args.metric_variant)
    if args.profile:
        profile = load_profile_csv(args.profile, args.target)
    else:
        dataset, _ = _load(cfg)
        try:
            normalized = normalize(dataset)
            profile = similarity_profile(normalized, first_filter(normalized, args.target, cfg.p))
        except StdsaError as exc:
            raise PipelineError("similarity", exc) from exc
    try:
        result, recommended = second_filter(profile, replace(_kmeans_config(cfg), k=cfg.k))
        rep = metrics(second_filter_points(profile), cv, iv)
    except StdsaError as exc:
        raise PipelineError("metrics", exc) from exc
    payload = {**rep.to_dict(), "target": profile.target, "chosen_k": result.chosen_k,
               "recommended": sorted(recommended)}
    if cfg.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif cfg.format == "csv":
        print("target,contrast,intrinsic_dim,contrast_variant,intrinsic_variant")
        print(f"{profile.target},{rep.contrast!r},{rep.intrinsic_dim!r},{cv},{iv}")
    else:
        print(f"{profile.target}: contrast {rep.contrast:.2f} ({cv}), intrinsic dim {rep.intrinsic_dim:.2f} ({iv}); "
              f"k={result.chosen_k}, recommended: {', '.join(sorted(recommended)) or '(none)'}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", help=f"dataset CSV (falls back to ${ENV_DATASET})")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--config", help="key=value config file; flags take precedence")
    common.add_argument("--seed", type=int)
    common.add_argument("--restarts", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="stdsa", description="Region similarity screening and recommendation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="validate a dataset and cache its normalized form")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", parents=[common], help="box-plot summaries, PCC matrix, elbow curve")
    p.add_argument("--indicator")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("recommend", parents=[common], help="run the two-stage filter for a target region")
    p.add_argument("--target")
    p.add_argument("--p", type=int)
    p.add_argument("--k")
    p.add_argument("--baseline-k", dest="baseline_k")
    p.add_argument("--keep-intermediate", action="store_true")
    p.add_argument("--metric-variant", help="CONTRAST:INTRINSIC, e.g. relative:half")
    p.add_argument("--similarity-input", choices=("normalized", "raw"), default="normalized")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("baseline", parents=[common], help="plain k-means over all indicators")
    p.add_argument("--target")
    p.add_argument("--baseline-k", dest="baseline_k")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("metrics", parents=[common], help="contrast and intrinsic dimension of the second filter")
    p.add_argument("--target")
    p.add_argument("--profile", help="similarity profile CSV (region,national_base,mass_base)")
    p.add_argument("--p", type=int)
    p.add_argument("--k")
    p.add_argument("--metric-variant")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stdsa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as exc:
        print(f"stdsa: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (StdsaError, OSError) as exc:
        print(f"stdsa: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"stdsa: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
