"""Event-table ingestion, cleaning, stratified splits and coded time series.

The reader accepts comma- or tab-delimited exports with a header; a column
mapping adapts arbitrary schemas (ACLED- and GTD-style exports both fit).
Licensed datasets are not bundled; a synthetic corpus with the same schema
ships with the package instead.
"""

from __future__ import annotations

import csv
import json
import random
import re
from collections import Counter
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .errors import InsufficientData

# annotator notes are bracket groups carrying a colon, e.g. "[size: no report]";
# colon-free placeholders like "[LOC]" are anonymization tokens and stay
_NOTE = re.compile(r"\[[^\[\]]*:[^\[\]]*\]")
_WS = re.compile(r"\s+")


def clean_description(raw: str) -> str:
    """Strip annotator notes and collapse whitespace; empty means drop."""
    text = _NOTE.sub(" ", raw)
    return _WS.sub(" ", text).strip()


@dataclass(frozen=True)
class EventRecord:
    id: str
    description: str
    label: str | None = None
    fatalities: int | None = None
    date: date | None = None
    region: str | None = None
    country: str | None = None

    def __post_init__(self):
        if not self.description:
            raise ValueError(f"record {self.id!r} has an empty description")
        if self.fatalities is not None and self.fatalities < 0:
            raise ValueError(f"record {self.id!r} has negative fatalities")


@dataclass(frozen=True)
class ColumnMap:
    """Names of the input columns holding each field; None means absent."""

    id: str = "id"
    description: str = "description"
    label: str | None = "label"
    fatalities: str | None = "fatalities"
    date: str | None = "date"
    region: str | None = "region"
    country: str | None = "country"


def _get(row: dict, column: str | None) -> str | None:
    if column is None or column not in row:
        return None
    value = row[column].strip()
    return value or None


def read_corpus(
    path: str | Path,
    columns: ColumnMap = ColumnMap(),
    delimiter: str | None = None,
) -> list[EventRecord]:
    """Load records from a delimited table, cleaning descriptions and dropping
    rows that clean to nothing. Duplicate ids are an error."""
    path = Path(path)
    if delimiter is None:
        delimiter = "\t" if path.suffix in (".tsv", ".tab") else ","
    records: list[EventRecord] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f, delimiter=delimiter):
            description = clean_description(row.get(columns.description, "") or "")
            if not description:
                continue
            record_id = (row.get(columns.id) or "").strip()
            if not record_id:
                raise ValueError(f"missing id in row: {row}")
            if record_id in seen:
                raise ValueError(f"duplicate record id {record_id!r}")
            seen.add(record_id)
            raw_fatalities = _get(row, columns.fatalities)
            raw_date = _get(row, columns.date)
            records.append(
                EventRecord(
                    id=record_id,
                    description=description,
                    label=_get(row, columns.label),
                    fatalities=int(raw_fatalities) if raw_fatalities is not None else None,
                    date=date.fromisoformat(raw_date) if raw_date is not None else None,
                    region=_get(row, columns.region),
                    country=_get(row, columns.country),
                )
            )
    return records


@dataclass(frozen=True)
class SplitSpec:
    n_train: int
    n_test: int
    seed: int = 0

    def __post_init__(self):
        if self.n_train < 1 or self.n_test < 1:
            raise ValueError("split sizes must be positive")


def _largest_remainder(targets: dict[str, float], total: int) -> dict[str, int]:
    """Integer allocation matching fractional targets, sum preserved."""
    floors = {c: int(t) for c, t in targets.items()}
    remainder = total - sum(floors.values())
    by_frac = sorted(targets, key=lambda c: (-(targets[c] - floors[c]), c))
    for c in by_frac[:remainder]:
        floors[c] += 1
    return floors


def stratified_split(
    records: list[EventRecord], spec: SplitSpec
) -> tuple[list[EventRecord], list[EventRecord]]:
    """Seeded split preserving per-class proportions within one record.

    Per-class allocations use largest-remainder rounding, so they depend only
    on the class counts, never on the seed; the seed decides which records
    land where.
    """
    if any(r.label is None for r in records):
        raise ValueError("stratified_split requires every record to be labeled")
    n = len(records)
    if spec.n_train + spec.n_test > n:
        raise InsufficientData(
            f"need {spec.n_train + spec.n_test} records, corpus has {n}"
        )
    by_class: dict[str, list[EventRecord]] = {}
    for r in records:
        by_class.setdefault(r.label, []).append(r)

    train_alloc = _largest_remainder(
        {c: spec.n_train * len(rs) / n for c, rs in by_class.items()}, spec.n_train
    )
    test_alloc = _largest_remainder(
        {c: spec.n_test * len(rs) / n for c, rs in by_class.items()}, spec.n_test
    )
    for c, rs in by_class.items():
        if train_alloc[c] + test_alloc[c] > len(rs):
            raise InsufficientData(
                f"class {c!r} has {len(rs)} records, needs "
                f"{train_alloc[c] + test_alloc[c]}"
            )

    rng = random.Random(spec.seed)
    train: list[EventRecord] = []
    test: list[EventRecord] = []
    for c in sorted(by_class):
        pool = sorted(by_class[c], key=lambda r: r.id)
        rng.shuffle(pool)
        train.extend(pool[: train_alloc[c]])
        test.extend(pool[train_alloc[c] : train_alloc[c] + test_alloc[c]])
    train.sort(key=lambda r: r.id)
    test.sort(key=lambda r: r.id)
    return train, test


@dataclass(frozen=True)
class TimeSeries:
    """Monthly counts for one event type, zero-filled across the covered range."""

    event_type: str
    region: str | None
    source: str
    points: tuple[tuple[str, int], ...]

    def total(self) -> int:
        return sum(count for _, count in self.points)

    def to_csv(self) -> str:
        lines = ["period,count"]
        lines += [f"{period},{count}" for period, count in self.points]
        return "\n".join(lines) + "\n"


def _month_key(d: date) -> str:
    return f"{d.year:04d}-{d.month:02d}"


def _next_month(year: int, month: int) -> tuple[int, int]:
    return (year + 1, 1) if month == 12 else (year, month + 1)


def monthly_time_series(
    coded: list[tuple[EventRecord, set[str]]],
    event_type: str,
    region: str | None = None,
    source: str = "prent",
) -> TimeSeries:
    """Count matching events per calendar month; multi-type events count once
    in every series whose type they carry."""
    matching = [
        record
        for record, types in coded
        if event_type in types
        and (region is None or record.region == region or record.country == region)
    ]
    dated = [r for r in matching if r.date is not None]
    if not dated:
        return TimeSeries(event_type, region, source, ())
    counts = Counter(_month_key(r.date) for r in dated)
    first, last = min(dated, key=lambda r: r.date).date, max(dated, key=lambda r: r.date).date
    points = []
    year, month = first.year, first.month
    while (year, month) <= (last.year, last.month):
        key = f"{year:04d}-{month:02d}"
        points.append((key, counts.get(key, 0)))
        year, month = _next_month(year, month)
    return TimeSeries(event_type, region, source, tuple(points))


def tokenize(text: str) -> list[str]:
    """Whitespace-delimited lowercased tokens."""
    return text.lower().split()


def corpus_stats(records: list[EventRecord]) -> dict[str, Counter]:
    """Description length distribution (in tokens) and unigram frequencies."""
    lengths: Counter = Counter()
    unigrams: Counter = Counter()
    for record in records:
        tokens = tokenize(record.description)
        lengths[len(tokens)] += 1
        unigrams.update(tokens)
    return {"length_distribution": lengths, "unigram_frequency": unigrams}


def write_coded_jsonl(
    coded: list[tuple[EventRecord, set[str]]], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record, types in coded:
            f.write(
                json.dumps(
                    {"event_id": record.id, "description": record.description,
                     "types": sorted(types)}
                )
                + "\n"
            )


@dataclass(frozen=True)
class ManifestSlot:
    """Where users drop official train/test event-id manifests for licensed
    datasets; the files themselves are not redistributable."""

    path: Path

    def load_ids(self) -> dict[str, list[str]]:
        with open(self.path, encoding="utf-8") as f:
            manifest = json.load(f)
        return {split: list(ids) for split, ids in manifest.items()}

    def select(self, records: list[EventRecord], split: str) -> list[EventRecord]:
        wanted = set(self.load_ids()[split])
        by_id = {r.id: r for r in records}
        missing = wanted - by_id.keys()
        if missing:
            raise InsufficientData(f"{len(missing)} manifest ids absent from corpus")
        return [by_id[i] for i in sorted(wanted)]
