"""CSV ingestion and persistence for region datasets and normalized caches.

Format: UTF-8, LF line endings, RFC-4180 quoting, header
``region,<indicator keys in schema order>``. Floats are written with
``repr`` (shortest round-trip decimal) so a save/load cycle is exact.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MissingColumn, StdsaError
from .preprocess import NormalizedDataset
from .schema import Dataset, IndicatorSchema, RegionRecord, default_schema, clean_region_name

log = logging.getLogger(__name__)

REGION_COLUMN = "region"


@dataclass
class IngestReport:
    rows_read: int = 0
    rows_accepted: int = 0
    rejects: list[tuple[int, str]] = field(default_factory=list)

    def __str__(self):
        lines = [f"rows read: {self.rows_read}, accepted: {self.rows_accepted}, rejected: {len(self.rejects)}"]
        lines += [f"  line {ln}: {reason}" for ln, reason in self.rejects]
        return "\n".join(lines)


def header_for(schema: IndicatorSchema) -> list[str]:
    return [REGION_COLUMN, *schema.keys]


def _fmt(value: float) -> str:
    return repr(float(value))


def _read_header(reader, schema: IndicatorSchema) -> tuple[dict[str, int], int]:
    header = next(reader, None)
    if header is None:
        raise MissingColumn("file is empty; expected header " + ",".join(header_for(schema)))
    header = [h.strip() for h in header]
    missing = [c for c in header_for(schema) if c not in header]
    if missing:
        raise MissingColumn(f"header lacks column(s): {', '.join(missing)}")
    extra = [c for c in header if c not in header_for(schema)]
    if extra:
        log.warning("ignoring unknown column(s): %s", ", ".join(extra))
    return {name: header.index(name) for name in header_for(schema)}, len(header)


def read_rows(text: str, schema: IndicatorSchema):
    """Yield ``(line_number, region, values | None, reason | None)`` per data row."""
    reader = csv.reader(io.StringIO(text))
    cols, width = _read_header(reader, schema)
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        line = reader.line_num
        if len(row) != width:
            yield line, None, None, f"ParseError: expected {width} cells, got {len(row)}"
            continue
        region = clean_region_name(row[cols[REGION_COLUMN]])
        values = {}
        reason = None
        for key in schema.keys:
            cell = row[cols[key]].strip()
            try:
                values[key] = float(cell)
            except ValueError:
                reason = f"ParseError: column {key}: non-numeric value {cell!r}"
                break
        yield line, region, (None if reason else values), reason


def load_csv(path, schema: IndicatorSchema | None = None) -> tuple[Dataset, IngestReport]:
    """Read a dataset CSV; malformed rows go to the report instead of the dataset."""
    schema = schema or default_schema()
    text = Path(path).read_text(encoding="utf-8-sig")
    report = IngestReport()
    records: list[RegionRecord] = []
    seen: set[str] = set()
    for line, region, values, reason in read_rows(text, schema):
        report.rows_read += 1
        if reason is None:
            if region in seen:
                reason = f"DuplicateRegion: '{region}' already loaded"
            else:
                try:
                    records.append(RegionRecord(region, values, schema))
                    seen.add(region)
                except StdsaError as exc:
                    reason = f"{type(exc).__name__}: {exc}"
        if reason is not None:
            report.rejects.append((line, reason))
    report.rows_accepted = len(records)
    if report.rejects:
        log.warning("%s: %d row(s) rejected", path, len(report.rejects))
    return Dataset(tuple(records), schema), report


def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header_for(dataset.schema))
    for rec in dataset.records:
        writer.writerow([rec.region, *(_fmt(rec.values[k]) for k in dataset.schema.keys)])
    return buf.getvalue()


def save_dataset(dataset: Dataset, path) -> None:
    Path(path).write_text(dataset_to_csv(dataset), encoding="utf-8", newline="")


def dataset_checksum(dataset: Dataset) -> str:
    """SHA-256 of the canonical CSV serialization."""
    return hashlib.sha256(dataset_to_csv(dataset).encode("utf-8")).hexdigest()


def bounds_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".bounds.csv")


def save_normalized(normalized: NormalizedDataset, path) -> None:
    """Write the normalized matrix plus a ``<stem>.bounds.csv`` sidecar (key,min,max)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header_for(normalized.schema))
    for region, row in zip(normalized.regions, normalized.matrix):
        writer.writerow([region, *(_fmt(v) for v in row)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "min", "max"])
    for key in normalized.schema.keys:
        lo, hi = normalized.bounds[key]
        writer.writerow([key, _fmt(lo), _fmt(hi)])
    bounds_path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def load_normalized(path, schema: IndicatorSchema | None = None) -> NormalizedDataset:
    schema = schema or default_schema()
    regions, rows = [], []
    for line, region, values, reason in read_rows(Path(path).read_text(encoding="utf-8"), schema):
        if reason is not None:
            raise StdsaError(f"{path}:{line}: {reason}")
        regions.append(region)
        rows.append([values[k] for k in schema.keys])

    bounds = {}
    with open(bounds_path(path), newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            bounds[row["key"]] = (float(row["min"]), float(row["max"]))
    missing = [k for k in schema.keys if k not in bounds]
    if missing:
        raise MissingColumn(f"bounds sidecar lacks {missing}")
    matrix = np.array(rows, dtype=float).reshape(len(rows), len(schema.keys))
    if not np.all(np.isfinite(matrix)) or matrix.size and (matrix.min() < 0 or matrix.max() > 1):
        raise StdsaError(f"{path}: normalized values must lie in [0, 1]")
    return NormalizedDataset(tuple(regions), matrix, bounds, schema)
