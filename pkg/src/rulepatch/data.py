"""Dataset ingestion (CSV + schema), seeded shuffling, splitting, partitioning.

Shuffles use numpy's PCG64 generator seeded directly by the run seed, which is
stable across platforms and library versions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .rules import CATEGORICAL, NUMERIC, Feature, Instance, Schema, format_value


class DataError(ValueError):
    pass


@dataclass
class Dataset:
    schema: Schema
    label_column: str
    rows: list[dict]
    labels: list[str]

    def __post_init__(self):
        if len(self.rows) != len(self.labels):
            raise DataError("rows and labels must pair up")

    def __len__(self) -> int:
        return len(self.rows)

    @staticmethod
    def concat(parts: list["Dataset"]) -> "Dataset":
        if not parts:
            raise DataError("nothing to concatenate")
        first = parts[0]
        rows = [r for p in parts for r in p.rows]
        labels = [lbl for p in parts for lbl in p.labels]
        return Dataset(first.schema, first.label_column, rows, labels)

    def subset(self, indices) -> "Dataset":
        return Dataset(
            self.schema,
            self.label_column,
            [self.rows[i] for i in indices],
            [self.labels[i] for i in indices],
        )

    def save_csv(self, path) -> None:
        names = [f.name for f in self.schema.features]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(names + [self.label_column])
            for row, label in zip(self.rows, self.labels):
                out = []
                for f in self.schema.features:
                    v = row[f.name]
                    out.append(repr(float(v)) if f.kind == NUMERIC else str(v))
                writer.writerow(out + [label])


def _parses_as_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _infer_schema(header, records, label_column, labels):
    features = []
    for name in header:
        if name == label_column:
            continue
        cells = [r[name] for r in records]
        non_empty = [c for c in cells if c != ""]
        if non_empty and all(_parses_as_number(c) for c in non_empty):
            features.append(Feature(name, NUMERIC))
        else:
            features.append(Feature(name, CATEGORICAL, domain=tuple(sorted(set(cells)))))
    return Schema(features, labels)


def load_csv(path, schema: Schema | None = None, label_column: str = "label",
             positive_label: str | None = None) -> Dataset:
    """Load an RFC-4180 CSV with header; columns typed per schema or inferred.

    When inferring, a column is numeric iff every non-empty cell parses as a
    decimal number.  The label column must contain exactly two distinct
    values; ``positive_label`` picks which one is positive (default: the
    second in sorted order).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        records = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            records.append(dict(zip(header, row)))
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not in header")
    if not records:
        raise DataError(f"{path}: no data rows")

    distinct_labels = sorted({r[label_column] for r in records})
    if len(distinct_labels) != 2:
        raise DataError(
            f"label column must have exactly 2 distinct values, got {len(distinct_labels)}"
        )
    if positive_label is not None:
        if positive_label not in distinct_labels:
            raise DataError(f"positive label {positive_label!r} not among {distinct_labels}")
        negative = next(l for l in distinct_labels if l != positive_label)
        labels = (negative, positive_label)
    else:
        labels = (distinct_labels[0], distinct_labels[1])

    if schema is None:
        schema = _infer_schema(header, records, label_column, labels)
    else:
        schema = Schema(schema.features, labels)

    rows: list[dict] = []
    for lineno, rec in enumerate(records, start=2):
        row: dict = {}
        for f in schema.features:
            if f.name not in rec:
                raise DataError(f"column {f.name!r} missing from CSV")
            cell = rec[f.name]
            if f.kind == NUMERIC:
                if cell == "" or not _parses_as_number(cell):
                    raise DataError(f"{path}:{lineno}: cell {cell!r} is not numeric for {f.name!r}")
                row[f.name] = float(cell)
            else:
                if cell not in f.domain:
                    raise DataError(f"{path}:{lineno}: category {cell!r} not in domain of {f.name!r}")
                row[f.name] = cell
        rows.append(row)
    return Dataset(schema, label_column, rows, [r[label_column] for r in records])


def train_test_split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle (PCG64), first ``floor(fraction * n)`` rows to train."""
    if not 0 < train_fraction < 1:
        raise DataError("train fraction must be in (0, 1)")
    n = len(ds)
    if n == 0:
        raise DataError("cannot split empty dataset")
    perm = np.random.default_rng(seed).permutation(n)
    cut = int(train_fraction * n)
    return ds.subset(perm[:cut]), ds.subset(perm[cut:])


def partition(ds: Dataset, k: int) -> list[Dataset]:
    """Contiguous near-equal parts; sizes differ by at most 1, earlier parts larger."""
    n = len(ds)
    if k < 1:
        raise DataError("k must be at least 1")
    if k > n:
        raise DataError(f"cannot split {n} rows into {k} parts")
    base, extra = divmod(n, k)
    parts = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        parts.append(ds.subset(range(start, start + size)))
        start += size
    return parts
