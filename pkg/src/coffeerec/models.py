"""Trained-model wrapper shared by all three families.

A TrainedRegressor couples fitted parameters with the encoder statistics
they were trained against, clamps every prediction into (0, 10], and
serializes to a versioned JSON text file whose round trip reproduces
bit-identical predictions.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .attributes import SCORE_FLOOR, SCORE_MAX
from .dataset import records_fingerprint, subjective_matrix
from .encoding import EncodedMatrix, FeatureEncoder
from .forest import ForestConfig, RandomForest
from .mlp import Mlp, MlpConfig
from .svr import SvrConfig, SvrEnsemble, TargetSvrParams

FAMILIES = ("rf", "svr", "mlp")

MODEL_FORMAT = "coffeerec-model"
MODEL_VERSION = 1


class ModelError(Exception):
    pass


def clamp_scores(values: np.ndarray) -> np.ndarray:
    """Clamp raw model outputs into (0, 10]: <=0 -> 0.01, >10 -> 10."""
    values = np.asarray(values, dtype=np.float64)
    return np.where(values <= 0.0, SCORE_FLOOR, np.minimum(values, SCORE_MAX))


def default_config(family: str):
    if family == "rf":
        return ForestConfig()
    if family == "svr":
        return SvrConfig()
    if family == "mlp":
        return MlpConfig()
    raise ModelError(f"unknown model family {family!r}; expected one of {FAMILIES}")


@dataclass
class TrainedRegressor:
    family: str
    model: object
    encoder: FeatureEncoder
    config: object
    seed: int
    fingerprint: str  # sha256 of the training records

    def predict_matrix(self, X: EncodedMatrix) -> np.ndarray:
        if X.encoder.signature() != self.encoder.signature():
            raise ModelError(
                "design matrix schema does not match the model's encoder statistics"
            )
        return clamp_scores(self.model.predict(X.values))

    def predict_records(self, records) -> np.ndarray:
        return clamp_scores(self.model.predict(self.encoder.transform(records).values))


def _reseeded(config, seed: int):
    if seed is None or not hasattr(config, "seed"):
        return config
    return type(config)(**{**asdict(config), "seed": seed})


def fit_forest(X: EncodedMatrix, Y, cfg: ForestConfig,
               fingerprint: str = "") -> TrainedRegressor:
    model = RandomForest(cfg).fit(X.values, np.asarray(Y, dtype=np.float64))
    return TrainedRegressor("rf", model, X.encoder, cfg, cfg.seed, fingerprint)


def fit_svr(X: EncodedMatrix, Y, cfg: SvrConfig,
            fingerprint: str = "") -> TrainedRegressor:
    model = SvrEnsemble(cfg).fit(X.values, np.asarray(Y, dtype=np.float64))
    return TrainedRegressor("svr", model, X.encoder, cfg, 0, fingerprint)


def fit_mlp(X: EncodedMatrix, Y, cfg: MlpConfig,
            fingerprint: str = "") -> TrainedRegressor:
    model = Mlp(cfg).fit(X.values, np.asarray(Y, dtype=np.float64))
    return TrainedRegressor("mlp", model, X.encoder, cfg, cfg.seed, fingerprint)


def train_regressor(records, family: str, config=None, seed=None) -> TrainedRegressor:
    """Fit an encoder plus model on cleaned records (the pipeline entry point)."""
    if family not in FAMILIES:
        raise ModelError(f"unknown model family {family!r}; expected one of {FAMILIES}")
    config = config if config is not None else default_config(family)
    config = _reseeded(config, seed)
    encoder = FeatureEncoder().fit(records)
    X = encoder.transform(records)
    Y = subjective_matrix(records)
    fingerprint = records_fingerprint(records)
    if family == "rf":
        return fit_forest(X, Y, config, fingerprint)
    if family == "svr":
        return fit_svr(X, Y, config, fingerprint)
    return fit_mlp(X, Y, config, fingerprint)


def _config_to_dict(family: str, config) -> dict:
    payload = asdict(config)
    if family == "svr" and payload.get("per_target") is not None:
        payload["per_target"] = [
            {"C": p.C, "gamma": p.gamma} for p in config.per_target
        ]
    return payload


def _config_from_dict(family: str, payload: dict):
    if family == "rf":
        return ForestConfig(**payload)
    if family == "svr":
        per_target = payload.get("per_target")
        if per_target is not None:
            per_target = tuple(
                TargetSvrParams(C=float(p["C"]), gamma=float(p["gamma"]))
                for p in per_target
            )
        return SvrConfig(
            per_target=per_target,
            epsilon=payload["epsilon"],
            tol=payload["tol"],
            max_iter=payload["max_iter"],
        )
    if family == "mlp":
        payload = dict(payload)
        payload["hidden_layers"] = tuple(payload["hidden_layers"])
        return MlpConfig(**payload)
    raise ModelError(f"unknown model family {family!r}")


def save_model(trained: TrainedRegressor, path: str):
    """Versioned, self-describing JSON serialization (deterministic bytes)."""
    document = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "family": trained.family,
        "seed": trained.seed,
        "fingerprint": trained.fingerprint,
        "config": _config_to_dict(trained.family, trained.config),
        "encoder": trained.encoder.to_dict(),
        "params": trained.model.to_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path: str) -> TrainedRegressor:
    with open(path, encoding="utf-8") as fh:
        document = json.load(fh)
    if document.get("format") != MODEL_FORMAT:
        raise ModelError(f"not a {MODEL_FORMAT} file: {path}")
    if document.get("version") != MODEL_VERSION:
        raise ModelError(f"unsupported model version {document.get('version')}")
    family = document["family"]
    config = _config_from_dict(family, document["config"])
    encoder = FeatureEncoder.from_dict(document["encoder"])
    if family == "rf":
        model = RandomForest.from_dict(document["params"], config)
    elif family == "svr":
        model = SvrEnsemble.from_dict(document["params"], config)
    elif family == "mlp":
        model = Mlp.from_dict(document["params"], config)
    else:
        raise ModelError(f"unknown model family {family!r} in {path}")
    return TrainedRegressor(
        family=family,
        model=model,
        encoder=encoder,
        config=config,
        seed=int(document["seed"]),
        fingerprint=document["fingerprint"],
    )


DEFAULT_MLP_SEARCH_SPACE = {
    "width": (16, 64, 128, 256),
    "depth": (1, 2, 3),
    "dropout_rate": (0.0, 0.1, 0.2, 0.3, 0.5),
    "learning_rate": (1e-4, 3e-4, 1e-3, 3e-3),
    "batch_size": (16, 32, 64),
}


def random_search_mlp(X: EncodedMatrix, Y, search_space=None, budget=10, seed=0,
                      folds=10, base: MlpConfig | None = None):
    """Random hyperparameter search scored by k-fold CV average RMSE.

    Samples `budget` configurations uniformly from the search space
    (width, depth, dropout, learning rate, batch size), scores each with
    the evaluation module's matrix-level cross-validation, and returns
    (best_config, best_score, trials). Ties break toward the earlier
    sample index.
    """
    from .evaluation import cross_validate_matrix  # deferred: avoids module cycle

    space = dict(DEFAULT_MLP_SEARCH_SPACE if search_space is None else search_space)
    for key, choices in space.items():
        if not choices:
            raise ModelError(f"search space dimension {key!r} is empty")
    if budget < 1:
        raise ModelError("budget must be >= 1")
    base = base if base is not None else MlpConfig()
    rng = np.random.default_rng(seed)

    trials = []
    best_index = -1
    best_score = np.inf
    for index in range(budget):
        choice = {key: values[rng.integers(len(values))] for key, values in space.items()}
        cfg = MlpConfig(
            hidden_layers=tuple([int(choice["width"])] * int(choice["depth"])),
            dropout_rate=float(choice["dropout_rate"]),
            learning_rate=float(choice["learning_rate"]),
            batch_size=int(choice["batch_size"]),
            epochs=base.epochs,
            beta1=base.beta1,
            beta2=base.beta2,
            adam_eps=base.adam_eps,
            seed=base.seed,
        )
        per_attr = cross_validate_matrix(
            X.values, np.asarray(Y, dtype=np.float64),
            lambda Xtr, Ytr, _cfg=cfg: Mlp(_cfg).fit(Xtr, Ytr),
            folds=folds, seed=seed,
        )
        score = float(np.mean(per_attr))
        trials.append({"config": cfg, "score": score})
        if score < best_score:
            best_score = score
            best_index = index
    return trials[best_index]["config"], best_score, trials
