"""Loading, cleaning, and partitioning of the coffee review data.

The raw input is the scraped Coffee Quality Institute CSV (one header
row, comma separated, UTF-8). Cleaning applies a fixed, fully logged
rule set and produces `CoffeeRecord` objects with dense ids; the cleaned
table round-trips through `write_cleaned` / `read_cleaned`.
"""

from __future__ import annotations

import csv
import hashlib
import os
from dataclasses import dataclass, field

import numpy as np

from .attributes import (
    N_SUBJECTIVE,
    OBJECTIVE_ATTRIBUTES,
    SCORE_MAX,
    SPECIES_VALUES,
    SUBJECTIVE_ATTRIBUTES,
    UNKNOWN_LABEL,
)


class DatasetError(Exception):
    """Raised for unreadable files or malformed headers."""


# Canonical attribute -> column name in the scraped CSV. "Flavor" is the
# source spelling; the canonical name is "flavour".
RAW_COLUMNS = {
    "species": "Species",
    "country_of_origin": "Country.of.Origin",
    "region": "Region",
    "variety": "Variety",
    "color": "Color",
    "category_one_defects": "Category.One.Defects",
    "category_two_defects": "Category.Two.Defects",
    "processing_method": "Processing.Method",
    "moisture": "Moisture",
    "aroma": "Aroma",
    "flavour": "Flavor",
    "body": "Body",
    "sweetness": "Sweetness",
    "acidity": "Acidity",
    "balance": "Balance",
    "uniformity": "Uniformity",
    "aftertaste": "Aftertaste",
}

ALTITUDE_MEAN_COLUMN = "altitude_mean_meters"


@dataclass(frozen=True)
class RawReview:
    """One source row, uninterpreted. Blank cells are stored as None."""

    row_index: int
    values: dict

    def text(self, column: str):
        return self.values.get(column)

    def number(self, column: str):
        """Parse a cell as float; unparseable or blank cells are None, never 0."""
        raw = self.values.get(column)
        if raw is None:
            return None
        try:
            return float(raw)
        except ValueError:
            return None


@dataclass(frozen=True)
class CoffeeRecord:
    """A cleaned review: 9 objective properties + 8 subjective scores."""

    id: int
    species: str
    country_of_origin: str
    region: str
    variety: str
    color: str
    category_one_defects: int
    category_two_defects: int
    processing_method: str
    moisture: float
    subjective: tuple  # 8 floats in canonical attribute order

    def subjective_dict(self) -> dict:
        return dict(zip(SUBJECTIVE_ATTRIBUTES, self.subjective))

    def objective_dict(self) -> dict:
        return {name: getattr(self, name) for name in OBJECTIVE_ATTRIBUTES}


def load_csv(path: str) -> list[RawReview]:
    """Read the scraped review CSV into RawReview rows.

    Args:
        path: CSV file with a header row.

    Returns:
        One RawReview per data row, in file order.

    Raises:
        DatasetError: if the file is missing or a required column is
            absent from the header (the message names the column).
    """
    if not os.path.isfile(path):
        raise DatasetError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"dataset file is empty (no header row): {path}")
        for canonical, column in RAW_COLUMNS.items():
            if column not in header:
                raise DatasetError(
                    f"required column {column!r} ({canonical}) missing from header of {path}"
                )
        reviews = []
        for i, row in enumerate(reader):
            cells = {}
            for name, value in zip(header, row):
                value = value.strip()
                cells[name] = value if value != "" else None
            reviews.append(RawReview(row_index=i, values=cells))
    return reviews


@dataclass
class CleaningLog:
    """Per-rule drop and fix counters for one clean() run."""

    total_rows: int = 0
    retained: int = 0
    dropped: dict = field(default_factory=dict)
    filled_unknown: dict = field(default_factory=dict)
    moisture_rescaled: int = 0
    moisture_clamped: int = 0

    def drop(self, rule: str):
        self.dropped[rule] = self.dropped.get(rule, 0) + 1

    def fill(self, attribute: str):
        self.filled_unknown[attribute] = self.filled_unknown.get(attribute, 0) + 1

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())

    def as_text(self) -> str:
        lines = [
            f"rows in: {self.total_rows}",
            f"rows retained: {self.retained}",
            f"rows dropped: {self.total_dropped}",
        ]
        for rule in sorted(self.dropped):
            lines.append(f"dropped[{rule}]: {self.dropped[rule]}")
        for attr in sorted(self.filled_unknown):
            lines.append(f"filled_unknown[{attr}]: {self.filled_unknown[attr]}")
        lines.append(f"moisture_rescaled_from_percent: {self.moisture_rescaled}")
        lines.append(f"moisture_clamped: {self.moisture_clamped}")
        return "\n".join(lines) + "\n"


@dataclass
class CleanResult:
    records: list
    log: CleaningLog


def _parse_defects(review: RawReview, column: str):
    value = review.number(column)
    if value is None or not np.isfinite(value) or value < 0:
        return None
    if value != int(value):
        return None
    return int(value)


def clean(reviews: list[RawReview]) -> CleanResult:
    """Apply the cleaning rules and assign dense ids in source order.

    A dropped row is counted under the first rule it fails (rule order:
    species, country, moisture, subjective-missing, subjective-range,
    defects). Absent region/variety/color/processing method become the
    "unknown" category; moisture above 1 is read as a percentage.
    """
    log = CleaningLog(total_rows=len(reviews))
    records = []
    for review in reviews:
        species = review.text(RAW_COLUMNS["species"])
        if species is None:
            log.drop("missing_species")
            continue
        species = species.strip().lower()
        if species not in SPECIES_VALUES:
            log.drop("invalid_species")
            continue

        country = review.text(RAW_COLUMNS["country_of_origin"])
        if country is None:
            log.drop("missing_country")
            continue

        moisture = review.number(RAW_COLUMNS["moisture"])
        if moisture is None or not np.isfinite(moisture):
            log.drop("missing_moisture")
            continue

        scores = []
        missing_score = False
        for attr in SUBJECTIVE_ATTRIBUTES:
            value = review.number(RAW_COLUMNS[attr])
            if value is None or not np.isfinite(value):
                missing_score = True
                break
            scores.append(value)
        if missing_score:
            log.drop("missing_subjective")
            continue
        if any(s <= 0.0 or s > SCORE_MAX for s in scores):
            log.drop("out_of_range_subjective")
            continue

        cat_one = _parse_defects(review, RAW_COLUMNS["category_one_defects"])
        cat_two = _parse_defects(review, RAW_COLUMNS["category_two_defects"])
        if cat_one is None or cat_two is None:
            log.drop("invalid_defects")
            continue

        if moisture > 1.0:
            moisture = moisture / 100.0
            log.moisture_rescaled += 1
        if moisture > 1.0 or moisture < 0.0:
            moisture = min(max(moisture, 0.0), 1.0)
            log.moisture_clamped += 1

        optional = {}
        for attr in ("region", "variety", "color", "processing_method"):
            value = review.text(RAW_COLUMNS[attr])
            if value is None:
                optional[attr] = UNKNOWN_LABEL
                log.fill(attr)
            else:
                optional[attr] = value.strip()

        records.append(
            CoffeeRecord(
                id=len(records),
                species=species,
                country_of_origin=country.strip(),
                region=optional["region"],
                variety=optional["variety"],
                color=optional["color"],
                category_one_defects=cat_one,
                category_two_defects=cat_two,
                processing_method=optional["processing_method"],
                moisture=moisture,
                subjective=tuple(scores),
            )
        )
    log.retained = len(records)
    return CleanResult(records=records, log=log)


CLEANED_COLUMNS = ("id",) + OBJECTIVE_ATTRIBUTES + SUBJECTIVE_ATTRIBUTES


def write_cleaned(records: list[CoffeeRecord], path: str):
    """Write the cleaned table (canonical column order, same CSV dialect)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CLEANED_COLUMNS)
        for rec in records:
            row = [rec.id]
            row += [getattr(rec, name) for name in OBJECTIVE_ATTRIBUTES]
            row += [repr(s) for s in rec.subjective]
            writer.writerow(row)


def read_cleaned(path: str) -> list[CoffeeRecord]:
    """Load a file produced by write_cleaned."""
    if not os.path.isfile(path):
        raise DatasetError(f"cleaned dataset file not found: {path}")
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CLEANED_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DatasetError(
                f"required column {missing[0]!r} missing from header of {path}"
            )
        for row in reader:
            records.append(
                CoffeeRecord(
                    id=int(row["id"]),
                    species=row["species"],
                    country_of_origin=row["country_of_origin"],
                    region=row["region"],
                    variety=row["variety"],
                    color=row["color"],
                    category_one_defects=int(row["category_one_defects"]),
                    category_two_defects=int(row["category_two_defects"]),
                    processing_method=row["processing_method"],
                    moisture=float(row["moisture"]),
                    subjective=tuple(float(row[a]) for a in SUBJECTIVE_ATTRIBUTES),
                )
            )
    return records


def subjective_matrix(records: list[CoffeeRecord]) -> np.ndarray:
    """Stack subjective score vectors into an (n, 8) float64 matrix."""
    if not records:
        return np.empty((0, N_SUBJECTIVE), dtype=np.float64)
    return np.array([rec.subjective for rec in records], dtype=np.float64)


def records_fingerprint(records: list[CoffeeRecord]) -> str:
    """Stable sha256 over the canonical serialization of the records."""
    digest = hashlib.sha256()
    for rec in records:
        parts = [str(rec.id)]
        parts += [str(getattr(rec, name)) for name in OBJECTIVE_ATTRIBUTES]
        parts += [repr(s) for s in rec.subjective]
        digest.update("\x1f".join(parts).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


@dataclass(frozen=True)
class DatasetPartition:
    """A reviewed/hidden split of record ids for the transductive protocol."""

    reviewed_ids: frozenset
    hidden_ids: frozenset
    m: float
    seed: int


def partition(records: list[CoffeeRecord], m: float, seed: int) -> DatasetPartition:
    """Uniform random split hiding round(m * n) records.

    Deterministic for fixed (records, m, seed). Uses banker's rounding so
    the hidden sizes for m and 1 - m always sum to n.
    """
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"hidden fraction m must be in [0, 1], got {m}")
    ids = [rec.id for rec in records]
    n_hidden = round(m * len(ids))
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    hidden = frozenset(ids[i] for i in order[:n_hidden])
    reviewed = frozenset(ids[i] for i in order[n_hidden:])
    return DatasetPartition(reviewed_ids=reviewed, hidden_ids=hidden, m=m, seed=seed)


def split_records(records: list[CoffeeRecord], part: DatasetPartition):
    """Return (reviewed, hidden) record lists in id order."""
    reviewed = [r for r in records if r.id in part.reviewed_ids]
    hidden = [r for r in records if r.id in part.hidden_ids]
    return reviewed, hidden
