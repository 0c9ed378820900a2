"""Cross-validated RMSE evaluation of the regression families.

Fold assignment is a seeded shuffle; encoder statistics are fitted
inside each training fold only, so the validation rows never influence
encoding or training. Reports serialize to a structured text file and a
tab-separated table.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .attributes import SUBJECTIVE_ATTRIBUTES
from .dataset import subjective_matrix
from .encoding import FeatureEncoder
from .models import clamp_scores, default_config, train_regressor


class EvaluationError(Exception):
    pass


def rmse(pred, truth) -> np.ndarray:
    """Column-wise root mean squared error."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise EvaluationError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise EvaluationError("empty input")
    diff = pred - truth
    return np.sqrt(np.mean(diff * diff, axis=0))


def fold_assignment(n: int, folds: int, seed: int) -> list:
    """Seeded shuffle split into `folds` near-equal validation index blocks."""
    if folds < 2:
        raise EvaluationError("folds must be >= 2")
    if n < folds:
        raise EvaluationError(f"need at least {folds} rows for {folds} folds, got {n}")
    rng = np.random.default_rng(seed)
    return np.array_split(rng.permutation(n), folds)


def cross_validate_matrix(X, Y, fit_fn, folds=10, seed=0) -> np.ndarray:
    """Per-column CV RMSE for a bare matrix model (no encoder refitting).

    fit_fn(Xtr, Ytr) must return an object with .predict(X). Used for
    hyperparameter search where X is already encoded.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    per_fold = []
    for val_idx in fold_assignment(X.shape[0], folds, seed):
        mask = np.ones(X.shape[0], dtype=bool)
        mask[val_idx] = False
        model = fit_fn(X[mask], Y[mask])
        pred = clamp_scores(model.predict(X[val_idx]))
        per_fold.append(rmse(pred, Y[val_idx]))
    return np.mean(per_fold, axis=0)


@dataclass
class CvReport:
    family: str
    folds: int
    seed: int
    per_attribute: dict  # attribute -> mean RMSE over folds
    average: float  # arithmetic mean of the 8 per-attribute values
    per_fold: list  # folds x 8 raw values
    train_fingerprints: list = field(default_factory=list)
    config_summary: str = ""

    def to_text(self) -> str:
        lines = [
            f"model family: {self.family}",
            f"folds: {self.folds}",
            f"seed: {self.seed}",
            f"config: {self.config_summary}",
            "",
            "per-attribute RMSE (mean over folds):",
        ]
        for attr in SUBJECTIVE_ATTRIBUTES:
            lines.append(f"  {attr}: {self.per_attribute[attr]:.6f}")
        lines.append("")
        lines.append(f"average RMSE: {self.average:.6f}")
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = ["model\taverage-RMSE", f"{self.family}\t{self.average:.6f}", ""]
        lines.append("attribute\tRMSE")
        for attr in SUBJECTIVE_ATTRIBUTES:
            lines.append(f"{attr}\t{self.per_attribute[attr]:.6f}")
        return "\n".join(lines) + "\n"


def _training_fingerprint(X, Y) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(X).tobytes())
    digest.update(np.ascontiguousarray(Y).tobytes())
    return digest.hexdigest()


def cross_validate(records, family: str, config=None, folds: int = 10,
                   seed: int = 0) -> CvReport:
    """k-fold CV of one model family on cleaned records.

    The encoder is refitted on each training fold; per-fold model seeds
    are spawned deterministically from the master seed.
    """
    config = config if config is not None else default_config(family)
    n = len(records)
    assignment = fold_assignment(n, folds, seed)
    fold_seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(folds)]

    per_fold = []
    fingerprints = []
    for fold, val_idx in enumerate(assignment):
        val_set = set(int(i) for i in val_idx)
        train_records = [rec for i, rec in enumerate(records) if i not in val_set]
        val_records = [rec for i, rec in enumerate(records) if i in val_set]
        trained = train_regressor(train_records, family, config, seed=fold_seeds[fold])
        fingerprints.append(
            _training_fingerprint(
                FeatureEncoder().fit(train_records).transform(train_records).values,
                subjective_matrix(train_records),
            )
        )
        pred = trained.predict_records(val_records)
        per_fold.append(rmse(pred, subjective_matrix(val_records)))

    per_attribute_values = np.mean(per_fold, axis=0)
    per_attribute = dict(zip(SUBJECTIVE_ATTRIBUTES, (float(v) for v in per_attribute_values)))
    return CvReport(
        family=family,
        folds=folds,
        seed=seed,
        per_attribute=per_attribute,
        average=float(np.mean(per_attribute_values)),
        per_fold=[[float(v) for v in row] for row in per_fold],
        train_fingerprints=fingerprints,
        config_summary=repr(config),
    )
