"""Typed record tables and per-record time series."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import (
    CsvTypeError,
    DuplicateIdentifier,
    HeaderMismatch,
    UnknownVariable,
)
from .predicate import Predicate, compile_predicate, variables

NUMBER = "number"
STRING = "string"


@dataclass(frozen=True)
class Schema:
    variables: tuple  # of (name, kind)
    identifying: tuple = ()

    def __post_init__(self):
        names = [n for n, _ in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names in schema")
        unknown = set(self.identifying) - set(names)
        if unknown:
            raise ValueError(f"identifying variables not in schema: {sorted(unknown)}")

    def names(self):
        return [n for n, _ in self.variables]

    def kind(self, name):
        for n, k in self.variables:
            if n == name:
                return k
        raise UnknownVariable(name)


@dataclass(frozen=True)
class Record:
    values: tuple  # of (name, value); value None means missing

    def as_dict(self):
        return dict(self.values)

    def get(self, name):
        return dict(self.values).get(name)

    def identifier(self, schema: Schema):
        vals = self.as_dict()
        ids = tuple(vals[n] for n in schema.identifying)
        return ids[0] if len(ids) == 1 else ids


@dataclass(frozen=True)
class TimeSeries:
    samples: tuple  # of (t, v)
    label: str = ""

    def __post_init__(self):
        ts = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("time stamps must be strictly increasing")

    def times(self):
        return [t for t, _ in self.samples]

    def forces(self):
        return [v for _, v in self.samples]


@dataclass
class Dataset:
    schema: Schema
    records: list = field(default_factory=list)
    series: dict = field(default_factory=dict)  # record identifier -> TimeSeries

    def __len__(self):
        return len(self.records)

    def identifiers(self):
        return [r.identifier(self.schema) for r in self.records]


def _parse_cell(raw, kind, row_no, name):
    if raw == "" or raw is None:
        return None
    if kind == NUMBER:
        try:
            return int(raw) if raw.lstrip("-").isdigit() else float(raw)
        except ValueError:
            raise CsvTypeError(row_no, name, f"not a number: {raw!r}")
    return raw


def load_csv(text: str, schema: Schema) -> Dataset:
    """Parse CSV text (first row header) against the schema.

    Header must contain exactly the schema variables, in any order.
    """
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise HeaderMismatch("missing header row")
    header = rows[0]
    if sorted(header) != sorted(schema.names()):
        raise HeaderMismatch(
            f"header {header} does not match schema variables {schema.names()}"
        )
    records = []
    seen_ids = set()
    for row_no, row in enumerate(rows[1:], start=2):
        if not row or all(cell == "" for cell in row):
            continue
        raw = dict(zip(header, row))
        values = tuple(
            (name, _parse_cell(raw.get(name), schema.kind(name), row_no, name))
            for name in schema.names()
        )
        record = Record(values)
        if schema.identifying:
            ident = record.identifier(schema)
            if ident is None or (isinstance(ident, tuple) and None in ident):
                raise CsvTypeError(row_no, schema.identifying[0], "missing identifier")
            if ident in seen_ids:
                raise DuplicateIdentifier(f"row {row_no}: {ident!r}")
            seen_ids.add(ident)
        records.append(record)
    return Dataset(schema=schema, records=records)


def write_csv(dataset: Dataset) -> str:
    """Canonical CSV text: schema column order, empty cell for missing."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    names = dataset.schema.names()
    writer.writerow(names)
    for record in dataset.records:
        vals = record.as_dict()
        writer.writerow(["" if vals[n] is None else vals[n] for n in names])
    return out.getvalue()


def filter_records(dataset: Dataset, predicate: Predicate) -> Dataset:
    """Subset dataset of records satisfying the predicate; order preserved."""
    known = set(dataset.schema.names())
    missing = variables(predicate) - known
    if missing:
        raise UnknownVariable(", ".join(sorted(missing)))
    test = compile_predicate(predicate)
    kept = [r for r in dataset.records if test(r.as_dict())]
    kept_ids = {r.identifier(dataset.schema) for r in kept} if dataset.schema.identifying else set()
    series = {k: v for k, v in dataset.series.items() if k in kept_ids}
    return Dataset(schema=dataset.schema, records=kept, series=series)


def load_series_csv(text: str, label: str = "") -> TimeSeries:
    """Parse a two-column t,v CSV (with header) into a TimeSeries."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or len(rows[0]) < 2:
        raise HeaderMismatch("expected a t,v header row")
    samples = []
    for row_no, row in enumerate(rows[1:], start=2):
        if not row or all(cell == "" for cell in row):
            continue
        try:
            samples.append((float(row[0]), float(row[1])))
        except (ValueError, IndexError):
            raise CsvTypeError(row_no, "t/v", f"bad sample row: {row!r}")
    return TimeSeries(samples=tuple(samples), label=label)


def write_series_csv(series: TimeSeries) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "v"])
    for t, v in series.samples:
        writer.writerow([t, v])
    return out.getvalue()
