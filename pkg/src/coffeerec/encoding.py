"""Objective-feature encoding: one-hot categoricals + standardized numerics.

The encoder is fitted on a set of cleaned records and is then a pure
function of its stored statistics, so a persisted encoder reproduces
identical columns on new data. Trees do not need the scaling, but the
SVR kernel and the MLP gradients do; one shared design matrix feeds all
three model families.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attributes import OBJECTIVE_CATEGORICAL, OBJECTIVE_NUMERIC


class EncodingError(Exception):
    pass


@dataclass(frozen=True)
class EncodedColumn:
    source: str  # canonical objective attribute
    kind: str  # "onehot" | "standardized"
    category: str | None


@dataclass
class EncodedMatrix:
    """Dense design matrix plus per-column provenance metadata."""

    values: np.ndarray  # (n, p) float64
    columns: tuple  # EncodedColumn per matrix column
    encoder: "FeatureEncoder"
    unseen: dict  # (feature, label) -> count, populated at transform time

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


class FeatureEncoder:
    """One-hot + z-score encoder over the nine objective attributes.

    Categorical vocabularies are the sorted label sets observed at fit
    time; one-hot blocks of a fitted-on record sum to exactly 1. Numeric
    statistics are population (ddof=0) mean/std. An unseen category at
    transform time becomes an all-zeros block and is counted in the
    transform log rather than raising.
    """

    def __init__(self):
        self.vocab: dict[str, tuple] = {}
        self.numeric_mean: dict[str, float] = {}
        self.numeric_std: dict[str, float] = {}
        self.zero_variance: tuple = ()
        self._columns: tuple = ()
        self.fitted = False

    def fit(self, records) -> "FeatureEncoder":
        if not records:
            raise EncodingError("cannot fit an encoder on an empty record list")
        for attr in OBJECTIVE_CATEGORICAL:
            labels = sorted({getattr(rec, attr) for rec in records})
            self.vocab[attr] = tuple(labels)
        flagged = []
        for attr in OBJECTIVE_NUMERIC:
            values = np.array([float(getattr(rec, attr)) for rec in records])
            mean = float(values.mean())
            std = float(values.std())  # ddof=0 by convention
            if std == 0.0:
                flagged.append(attr)
            self.numeric_mean[attr] = mean
            self.numeric_std[attr] = std
        self.zero_variance = tuple(flagged)
        columns = []
        for attr in OBJECTIVE_CATEGORICAL:
            for label in self.vocab[attr]:
                columns.append(EncodedColumn(attr, "onehot", label))
        for attr in OBJECTIVE_NUMERIC:
            columns.append(EncodedColumn(attr, "standardized", None))
        self._columns = tuple(columns)
        self.fitted = True
        return self

    @property
    def columns(self) -> tuple:
        return self._columns

    def transform(self, records) -> EncodedMatrix:
        if not self.fitted:
            raise EncodingError("encoder is not fitted")
        n = len(records)
        values = np.zeros((n, len(self._columns)), dtype=np.float64)
        unseen: dict = {}
        col = 0
        for attr in OBJECTIVE_CATEGORICAL:
            index = {label: i for i, label in enumerate(self.vocab[attr])}
            width = len(index)
            for row, rec in enumerate(records):
                label = getattr(rec, attr)
                i = index.get(label)
                if i is None:
                    key = (attr, label)
                    unseen[key] = unseen.get(key, 0) + 1
                else:
                    values[row, col + i] = 1.0
            col += width
        for attr in OBJECTIVE_NUMERIC:
            raw = np.array([float(getattr(rec, attr)) for rec in records])
            std = self.numeric_std[attr]
            values[:, col] = (raw - self.numeric_mean[attr]) / (std if std > 0 else 1.0)
            col += 1
        return EncodedMatrix(values=values, columns=self._columns, encoder=self, unseen=unseen)

    def fit_transform(self, records) -> EncodedMatrix:
        return self.fit(records).transform(records)

    def signature(self) -> tuple:
        """Schema identity used to reject mismatched matrices at predict time."""
        return tuple((c.source, c.kind, c.category) for c in self._columns)

    def to_dict(self) -> dict:
        return {
            "vocab": {attr: list(labels) for attr, labels in self.vocab.items()},
            "numeric_mean": dict(self.numeric_mean),
            "numeric_std": dict(self.numeric_std),
            "zero_variance": list(self.zero_variance),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FeatureEncoder":
        enc = cls()
        enc.vocab = {attr: tuple(labels) for attr, labels in payload["vocab"].items()}
        enc.numeric_mean = {k: float(v) for k, v in payload["numeric_mean"].items()}
        enc.numeric_std = {k: float(v) for k, v in payload["numeric_std"].items()}
        enc.zero_variance = tuple(payload["zero_variance"])
        columns = []
        for attr in OBJECTIVE_CATEGORICAL:
            for label in enc.vocab[attr]:
                columns.append(EncodedColumn(attr, "onehot", label))
        for attr in OBJECTIVE_NUMERIC:
            columns.append(EncodedColumn(attr, "standardized", None))
        enc._columns = tuple(columns)
        enc.fitted = True
        return enc


def encode(records) -> EncodedMatrix:
    """Fit a fresh encoder on the records and return their design matrix."""
    return FeatureEncoder().fit_transform(records)
