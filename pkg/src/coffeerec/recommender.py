"""Recommendation space and exact kNN preference matching.

The space is an immutable, id-ordered collection of 8-dimensional
subjective vectors; reviewed and predicted beans live side by side with
a provenance tag. Queries are exact Euclidean scans (n is small enough
that a linear pass is sub-millisecond) with ties broken by ascending
bean id for cross-platform determinism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attributes import N_SUBJECTIVE, SCORE_MAX, SUBJECTIVE_ATTRIBUTES

DISTANCE_METRIC = "euclidean"

PROVENANCE_REVIEWED = "reviewed"
PROVENANCE_PREDICTED = "predicted"


class RecommenderError(Exception):
    pass


@dataclass(frozen=True)
class SpaceEntry:
    bean_id: int
    subjective: tuple  # 8 floats, canonical order
    provenance: str
    species: str
    country_of_origin: str
    region: str
    variety: str
    processing_method: str


@dataclass(frozen=True)
class Recommendation:
    rank: int  # 1-based
    bean_id: int
    distance: float
    match_score: float  # 1 / (1 + distance), in (0, 1]
    provenance: str
    species: str
    country_of_origin: str
    region: str
    variety: str
    processing_method: str


class RecommendationSpace:
    def __init__(self, entries, fingerprint: str):
        self.entries = tuple(sorted(entries, key=lambda e: e.bean_id))
        self.metric = DISTANCE_METRIC
        self.fingerprint = fingerprint
        self._ids = np.array([e.bean_id for e in self.entries], dtype=np.int64)
        self._vectors = (
            np.array([e.subjective for e in self.entries], dtype=np.float64)
            if self.entries
            else np.empty((0, N_SUBJECTIVE))
        )

    def __len__(self) -> int:
        return len(self.entries)

    def entry_by_id(self, bean_id: int):
        pos = np.searchsorted(self._ids, bean_id)
        if pos < len(self._ids) and self._ids[pos] == bean_id:
            return self.entries[pos]
        return None

    @property
    def vectors(self) -> np.ndarray:
        return self._vectors

    def medians(self) -> dict:
        if not self.entries:
            return {attr: 0.0 for attr in SUBJECTIVE_ATTRIBUTES}
        med = np.median(self._vectors, axis=0)
        return dict(zip(SUBJECTIVE_ATTRIBUTES, (float(v) for v in med)))

    def export_tsv(self, path: str):
        header = ["bean_id", "provenance", *SUBJECTIVE_ATTRIBUTES,
                  "species", "country_of_origin", "region", "variety",
                  "processing_method"]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t".join(header) + "\n")
            for e in self.entries:
                row = [str(e.bean_id), e.provenance]
                row += [repr(v) for v in e.subjective]
                row += [e.species, e.country_of_origin, e.region, e.variety,
                        e.processing_method]
                fh.write("\t".join(row) + "\n")


def _entry_from_record(record, subjective, provenance) -> SpaceEntry:
    return SpaceEntry(
        bean_id=record.id,
        subjective=tuple(float(v) for v in subjective),
        provenance=provenance,
        species=record.species,
        country_of_origin=record.country_of_origin,
        region=record.region,
        variety=record.variety,
        processing_method=record.processing_method,
    )


def build_space(reviewed, predicted, fingerprint: str = "") -> RecommendationSpace:
    """Combine reviewed records and (record, predicted-vector) pairs.

    Args:
        reviewed: CoffeeRecord list whose own subjective scores are used.
        predicted: (CoffeeRecord, vector) pairs for beans whose scores
            were imputed by a model.
        fingerprint: build provenance (dataset + model hashes).

    Raises:
        RecommenderError: on a bean id appearing in both inputs.
    """
    entries = []
    seen = set()
    for record in reviewed:
        if record.id in seen:
            raise RecommenderError(f"duplicate bean id {record.id} in reviewed input")
        seen.add(record.id)
        entries.append(_entry_from_record(record, record.subjective, PROVENANCE_REVIEWED))
    for record, vector in predicted:
        if record.id in seen:
            raise RecommenderError(
                f"bean id {record.id} appears in both reviewed and predicted inputs"
            )
        seen.add(record.id)
        entries.append(_entry_from_record(record, vector, PROVENANCE_PREDICTED))
    return RecommendationSpace(entries, fingerprint)


def recommend(space: RecommendationSpace, preferences, k: int) -> list:
    """The k space entries nearest to the preference vector.

    Exact Euclidean scan; ties broken by ascending bean id; output sorted
    by (distance, bean_id) with contiguous 1-based ranks.
    """
    if len(space) == 0:
        raise RecommenderError("recommendation space is empty")
    if not 1 <= k <= len(space):
        raise RecommenderError(f"k must be in [1, {len(space)}], got {k}")
    u = np.asarray(preferences, dtype=np.float64)
    if u.shape != (N_SUBJECTIVE,):
        raise RecommenderError(f"preference vector must have {N_SUBJECTIVE} components")
    for name, value in zip(SUBJECTIVE_ATTRIBUTES, u):
        if not 0.0 <= value <= SCORE_MAX:
            raise RecommenderError(f"preference {name} must be in [0, 10], got {value}")

    diff = space.vectors - u
    distances = np.sqrt((diff * diff).sum(axis=1))
    order = np.lexsort((space._ids, distances))[:k]
    results = []
    for rank, pos in enumerate(order, start=1):
        e = space.entries[pos]
        d = float(distances[pos])
        results.append(
            Recommendation(
                rank=rank,
                bean_id=e.bean_id,
                distance=d,
                match_score=1.0 / (1.0 + d),
                provenance=e.provenance,
                species=e.species,
                country_of_origin=e.country_of_origin,
                region=e.region,
                variety=e.variety,
                processing_method=e.processing_method,
            )
        )
    return results


def rec_acc(ground_ids, pred_ids) -> float:
    """Overlap fraction |ground ∩ pred| / k between two top-k id lists."""
    ground = list(ground_ids)
    pred = list(pred_ids)
    if len(ground) != len(pred):
        raise RecommenderError(
            f"recommendation lists differ in length: {len(ground)} vs {len(pred)}"
        )
    if not ground:
        raise RecommenderError("recommendation lists are empty")
    if len(set(ground)) != len(ground) or len(set(pred)) != len(pred):
        raise RecommenderError("recommendation lists must not contain duplicates")
    return len(set(ground) & set(pred)) / len(ground)
