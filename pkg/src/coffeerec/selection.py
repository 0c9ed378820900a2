"""Feature-selection diagnostics: univariate F scores, tree importances,
and the 17-attribute Pearson correlation table.

These reproduce the analysis that fixed the operative feature set; the
pipeline itself always uses the nine objective attributes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attributes import (
    OBJECTIVE_ATTRIBUTES,
    OBJECTIVE_CATEGORICAL,
    SUBJECTIVE_ATTRIBUTES,
)
from .encoding import EncodedMatrix
from .forest import ForestConfig, RandomForest

_EPS = 1e-12


@dataclass
class UnivariateResult:
    scores: np.ndarray  # per encoded column, mean F over targets
    per_target: np.ndarray  # (columns, targets) F statistics
    zero_variance: tuple  # flagged column indices


def univariate_scores(X: EncodedMatrix, Y) -> UnivariateResult:
    """Regression F statistic of each encoded column against each target.

    F = r^2 / (1 - r^2) * (n - 2) per (column, target), aggregated by the
    mean over targets. Zero-variance columns score 0 and are flagged.
    """
    values = X.values
    Y = np.asarray(Y, dtype=np.float64)
    if values.shape[0] != Y.shape[0]:
        raise ValueError("X and Y row counts differ")
    n = values.shape[0]
    xc = values - values.mean(axis=0)
    yc = Y - Y.mean(axis=0)
    x_ss = (xc * xc).sum(axis=0)
    y_ss = (yc * yc).sum(axis=0)
    zero_var = x_ss <= _EPS
    denom = np.sqrt(np.outer(np.where(zero_var, 1.0, x_ss), np.maximum(y_ss, _EPS)))
    r = (xc.T @ yc) / denom
    r2 = np.clip(r * r, 0.0, 1.0)
    f = r2 / np.maximum(1.0 - r2, _EPS) * max(n - 2, 1)
    f[zero_var, :] = 0.0
    f[:, y_ss <= _EPS] = 0.0
    return UnivariateResult(
        scores=f.mean(axis=1),
        per_target=f,
        zero_variance=tuple(int(i) for i in np.flatnonzero(zero_var)),
    )


def feature_level_scores(result: UnivariateResult, X: EncodedMatrix) -> dict:
    """Mean univariate score per source attribute (over its encoded columns)."""
    totals: dict = {}
    counts: dict = {}
    for score, column in zip(result.scores, X.columns):
        totals[column.source] = totals.get(column.source, 0.0) + float(score)
        counts[column.source] = counts.get(column.source, 0) + 1
    return {src: totals[src] / counts[src] for src in totals}


@dataclass
class ImportanceResult:
    importances: np.ndarray  # per encoded column, sums to 1 unless degenerate
    degenerate: bool


def tree_importance(X: EncodedMatrix, Y, config: ForestConfig | None = None,
                    seed: int = 0) -> ImportanceResult:
    """Mean impurity-reduction importance over the trees of a fitted forest."""
    Y = np.asarray(Y, dtype=np.float64)
    if X.values.shape[0] != Y.shape[0]:
        raise ValueError("X and Y row counts differ")
    cfg = config if config is not None else ForestConfig(seed=seed)
    forest = RandomForest(cfg).fit(X.values, Y)
    importances, degenerate = forest.feature_importances()
    return ImportanceResult(importances=importances, degenerate=degenerate)


PEARSON_ATTRIBUTES = OBJECTIVE_ATTRIBUTES + SUBJECTIVE_ATTRIBUTES


@dataclass
class PearsonResult:
    attributes: tuple
    matrix: np.ndarray  # 17 x 17, symmetric, unit diagonal
    zero_variance: tuple  # flagged attribute names

    def to_tsv(self) -> str:
        lines = ["\t".join(("attribute",) + self.attributes)]
        for name, row in zip(self.attributes, self.matrix):
            lines.append("\t".join([name] + [f"{v:.6f}" for v in row]))
        return "\n".join(lines) + "\n"


def pearson_matrix(records) -> PearsonResult:
    """Pearson correlation over the 17 attributes.

    Categorical attributes enter through their ordinal codes (index into
    the sorted observed vocabulary) - a documented diagnostic convention
    only. Zero-variance attributes get zero off-diagonal entries, a unit
    diagonal, and a flag.
    """
    if not records:
        raise ValueError("pearson_matrix needs at least one record")
    columns = []
    for attr in OBJECTIVE_ATTRIBUTES:
        if attr in OBJECTIVE_CATEGORICAL:
            vocab = {label: i for i, label in
                     enumerate(sorted({getattr(r, attr) for r in records}))}
            columns.append([float(vocab[getattr(r, attr)]) for r in records])
        else:
            columns.append([float(getattr(r, attr)) for r in records])
    for i in range(len(SUBJECTIVE_ATTRIBUTES)):
        columns.append([r.subjective[i] for r in records])
    data = np.array(columns, dtype=np.float64)

    stds = data.std(axis=1)
    flagged = [PEARSON_ATTRIBUTES[i] for i in np.flatnonzero(stds <= _EPS)]
    with np.errstate(invalid="ignore", divide="ignore"):
        matrix = np.corrcoef(data)
    matrix = np.nan_to_num(matrix, nan=0.0)
    matrix = np.clip((matrix + matrix.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(matrix, 1.0)
    return PearsonResult(
        attributes=PEARSON_ATTRIBUTES,
        matrix=matrix,
        zero_variance=tuple(flagged),
    )
