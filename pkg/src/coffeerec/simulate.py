"""Transductive recommendation-accuracy protocol.

For each hidden fraction m and repetition: hide round(m * n) beans,
train the regressor on the reviewed rest, predict the hidden beans'
scores, and compare top-k recommendations from the ground-truth space
against the reviewed+predicted space for simulated users drawn from a
KDE over the full subjective matrix. Accuracy per user is the top-k id
overlap fraction; repetitions make the estimate robust to the
partitioning.

Every (m, repetition) cell owns an independent RNG stream derived from
(seed, m-index, repetition), so the sweep is reproducible and could be
parallelized per cell without changing results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import partition, records_fingerprint, split_records, subjective_matrix
from .kde import fit_kde, sample_users
from .models import train_regressor
from .recommender import build_space, rec_acc, recommend

DEFAULT_M_VALUES = (0.10, 0.20, 0.33, 0.50)


class SimulationError(Exception):
    pass


@dataclass
class AccuracyRow:
    m: float
    mean: float
    std: float
    n_samples: int


@dataclass
class AccuracyReport:
    k: int
    family: str
    n_users: int
    repetitions: int
    seed: int
    rows: list  # AccuracyRow per m, in input order

    def to_text(self) -> str:
        lines = [
            f"model family: {self.family}",
            f"k: {self.k}",
            f"simulated users: {self.n_users}",
            f"repetitions: {self.repetitions}",
            f"seed: {self.seed}",
            "",
            "prediction size -> recommendation accuracy (mean, std):",
        ]
        for row in self.rows:
            lines.append(
                f"  {row.m:.2%}: {row.mean:.6f} (std {row.std:.6f}, "
                f"n {row.n_samples})"
            )
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = ["prediction-size\taccuracy-mean\taccuracy-std"]
        for row in self.rows:
            lines.append(f"{row.m:.2f}\t{row.mean:.6f}\t{row.std:.6f}")
        return "\n".join(lines) + "\n"


def oracle_predictor_factory(reviewed_records, hidden_records, train_seed):
    """Test hook: a perfect predictor returning the true hidden scores."""

    class _Oracle:
        def predict_records(self, records):
            return subjective_matrix(records)

    return _Oracle()


def _default_predictor_factory(family, config):
    def factory(reviewed_records, hidden_records, train_seed):
        return train_regressor(reviewed_records, family, config, seed=train_seed)

    return factory


def accuracy_sweep(records, family: str = "rf", config=None, k: int = 5,
                   m_values=DEFAULT_M_VALUES, n_users: int = 100,
                   repetitions: int = 10, seed: int = 0,
                   predictor_factory=None) -> AccuracyReport:
    """Mean recommendation accuracy per hidden fraction m."""
    n = len(records)
    if k < 1:
        raise SimulationError("k must be >= 1")
    if k > n:
        raise SimulationError(f"k={k} exceeds the dataset size {n}")
    if n_users < 1:
        raise SimulationError("n_users must be >= 1")
    if repetitions < 1:
        raise SimulationError("repetitions must be >= 1")
    m_values = tuple(m_values)
    for m in m_values:
        if not 0.0 <= m <= 1.0:
            raise SimulationError(f"m must be in [0, 1], got {m}")

    if predictor_factory is None:
        predictor_factory = _default_predictor_factory(family, config)

    dataset_fp = records_fingerprint(records)
    kde = fit_kde(subjective_matrix(records), seed)
    ground_space = build_space(records, [], fingerprint=dataset_fp)

    rows = []
    for m_index, m in enumerate(m_values):
        accuracies = []
        for rep in range(repetitions):
            cell = np.random.SeedSequence((seed, m_index, rep))
            part_seed, train_seed, user_seed = (int(v) for v in cell.generate_state(3))
            part = partition(records, m, part_seed)
            users = sample_users(kde, n_users, rng=np.random.default_rng(user_seed))
            if not part.hidden_ids:
                accuracies.extend([1.0] * n_users)
                continue
            reviewed, hidden = split_records(records, part)
            predictor = predictor_factory(reviewed, hidden, train_seed)
            predictions = predictor.predict_records(hidden)
            pred_space = build_space(
                reviewed,
                list(zip(hidden, predictions)),
                fingerprint=dataset_fp,
            )
            for u in users:
                ground_ids = [r.bean_id for r in recommend(ground_space, u, k)]
                pred_ids = [r.bean_id for r in recommend(pred_space, u, k)]
                accuracies.append(rec_acc(ground_ids, pred_ids))
        accuracies = np.array(accuracies)
        rows.append(
            AccuracyRow(
                m=float(m),
                mean=float(accuracies.mean()),
                std=float(accuracies.std(ddof=1)) if accuracies.size > 1 else 0.0,
                n_samples=int(accuracies.size),
            )
        )
    return AccuracyReport(
        k=k,
        family=family,
        n_users=n_users,
        repetitions=repetitions,
        seed=seed,
        rows=rows,
    )
