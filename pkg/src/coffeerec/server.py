"""HTTP service exposing the recommendation space to the preference UI.

Endpoints: GET /health, GET /metadata, GET /beans/{id}, POST /recommend.
Request and response field names are fixed to the eight canonical
subjective attribute names; unknown fields are rejected. The space is
immutable after startup and shared read-only across requests; replacing
it is a single attribute swap.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from .attributes import DEFAULT_SEED, SUBJECTIVE_ATTRIBUTES
from .dataset import partition, read_cleaned, records_fingerprint, split_records
from .models import load_model
from .recommender import build_space, recommend

SLIDER_STEP = 0.25
K_CHOICES = (1, 3, 5, 10)


@dataclass
class ServiceConfig:
    dataset_path: str
    model_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    k_default: int = 5
    seed: int = DEFAULT_SEED
    hidden_fraction: float = 0.0  # fraction of beans served with predicted scores
    dev_mode: bool = False
    verbosity: str = "info"

    def validate(self):
        if self.k_default < 1:
            raise ValueError("k_default must be >= 1")
        if not 0.0 <= self.hidden_fraction < 1.0:
            raise ValueError("hidden_fraction must be in [0, 1)")

    @classmethod
    def from_file(cls, path: str, **overrides) -> "ServiceConfig":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        payload.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**payload)


class PreferencePayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    aroma: float = Field(ge=0, le=10)
    flavour: float = Field(ge=0, le=10)
    body: float = Field(ge=0, le=10)
    sweetness: float = Field(ge=0, le=10)
    acidity: float = Field(ge=0, le=10)
    balance: float = Field(ge=0, le=10)
    uniformity: float = Field(ge=0, le=10)
    aftertaste: float = Field(ge=0, le=10)

    def vector(self):
        return [getattr(self, attr) for attr in SUBJECTIVE_ATTRIBUTES]


class RecommendRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preferences: PreferencePayload
    k: int | None = Field(default=None, ge=1)


class RecommendationItem(BaseModel):
    rank: int
    bean_id: int
    distance: float
    match_score: float
    provenance: str
    species: str
    country_of_origin: str
    region: str
    variety: str
    processing_method: str


class RecommendResponse(BaseModel):
    recommendations: list[RecommendationItem]
    k: int
    fingerprint: str


class BeanResponse(BaseModel):
    bean_id: int
    provenance: str
    subjective: PreferencePayload
    species: str
    country_of_origin: str
    region: str
    variety: str
    processing_method: str


class ServiceState:
    """Startup-built space; `space` is swapped atomically on reload."""

    def __init__(self, cfg: ServiceConfig):
        cfg.validate()
        self.cfg = cfg
        self.space = self._build_space()

    def _build_space(self):
        if not os.path.isfile(self.cfg.dataset_path):
            raise FileNotFoundError(f"dataset file not found: {self.cfg.dataset_path}")
        if not os.path.isfile(self.cfg.model_path):
            raise FileNotFoundError(f"model file not found: {self.cfg.model_path}")
        records = read_cleaned(self.cfg.dataset_path)
        model = load_model(self.cfg.model_path)
        fingerprint = records_fingerprint(records)[:16] + ":" + model.fingerprint[:16]
        if self.cfg.hidden_fraction > 0.0:
            part = partition(records, self.cfg.hidden_fraction, self.cfg.seed)
            reviewed, hidden = split_records(records, part)
            predictions = model.predict_records(hidden)
            return build_space(reviewed, list(zip(hidden, predictions)), fingerprint)
        return build_space(records, [], fingerprint)

    def reload(self):
        self.space = self._build_space()


def _item(rec) -> RecommendationItem:
    return RecommendationItem(
        rank=rec.rank,
        bean_id=rec.bean_id,
        distance=rec.distance,
        match_score=rec.match_score,
        provenance=rec.provenance,
        species=rec.species,
        country_of_origin=rec.country_of_origin,
        region=rec.region,
        variety=rec.variety,
        processing_method=rec.processing_method,
    )


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="coffeerec service")
    if state.cfg.dev_mode:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "fingerprint": state.space.fingerprint}

    @app.get("/metadata")
    def metadata():
        return {
            "attributes": list(SUBJECTIVE_ATTRIBUTES),
            "score_min": 0.0,
            "score_max": 10.0,
            "slider_step": SLIDER_STEP,
            "default_k": state.cfg.k_default,
            "k_choices": list(K_CHOICES),
            "medians": state.space.medians(),
            "fingerprint": state.space.fingerprint,
        }

    @app.get("/beans/{bean_id}", response_model=BeanResponse)
    def bean(bean_id: int):
        entry = state.space.entry_by_id(bean_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown bean id {bean_id}")
        return BeanResponse(
            bean_id=entry.bean_id,
            provenance=entry.provenance,
            subjective=PreferencePayload(
                **dict(zip(SUBJECTIVE_ATTRIBUTES, entry.subjective))
            ),
            species=entry.species,
            country_of_origin=entry.country_of_origin,
            region=entry.region,
            variety=entry.variety,
            processing_method=entry.processing_method,
        )

    @app.post("/recommend", response_model=RecommendResponse)
    def recommend_route(request: RecommendRequest):
        space = state.space
        if len(space) == 0:
            raise HTTPException(status_code=503, detail="recommendation space is empty")
        k = request.k if request.k is not None else state.cfg.k_default
        k = min(k, len(space))  # response length = min(k, space size)
        results = recommend(space, request.preferences.vector(), k)
        return RecommendResponse(
            recommendations=[_item(r) for r in results],
            k=k,
            fingerprint=space.fingerprint,
        )

    return app


def serve(cfg: ServiceConfig):
    """Build the space and run uvicorn (blocking)."""
    import uvicorn

    state = ServiceState(cfg)
    app = create_app(state)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level=cfg.verbosity)
