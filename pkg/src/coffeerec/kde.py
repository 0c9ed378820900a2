"""Gaussian product-kernel density estimation and user simulation.

Bandwidths follow Scott's rule per attribute: std * n^(-1/(d+4)).
Sampling draws a training row uniformly and adds per-attribute Gaussian
kernel noise (exact mixture sampling), then the 8-wide user-simulation
wrapper clamps into the score range.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .attributes import N_SUBJECTIVE
from .models import clamp_scores

_BANDWIDTH_FLOOR = 1e-3
_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass
class GaussianProductKde:
    data: np.ndarray  # (n, d)
    bandwidths: np.ndarray  # (d,)
    seed: int
    flagged: tuple = field(default=())  # dims whose bandwidth hit the floor

    @classmethod
    def fit(cls, data, seed: int) -> "GaussianProductKde":
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 2:
            raise ValueError("KDE needs a 2-d data matrix with at least 2 rows")
        n, d = data.shape
        scott = n ** (-1.0 / (d + 4.0))
        stds = data.std(axis=0, ddof=1)
        bandwidths = stds * scott
        flagged = tuple(int(j) for j in np.flatnonzero(bandwidths < _BANDWIDTH_FLOOR))
        if flagged:
            warnings.warn(
                f"zero/near-zero variance in dimensions {flagged}; "
                f"bandwidth floored at {_BANDWIDTH_FLOOR}"
            )
            bandwidths = np.maximum(bandwidths, _BANDWIDTH_FLOOR)
        return cls(data=data, bandwidths=bandwidths, seed=seed, flagged=flagged)

    def density(self, points) -> np.ndarray:
        """Joint density of the product-kernel mixture at each query point."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        n, d = self.data.shape
        out = np.empty(points.shape[0])
        h = self.bandwidths
        norm = n * np.prod(_SQRT_2PI * h)
        # Chunked over queries; (chunk, n, d) intermediates stay small.
        chunk = max(1, int(2_000_000 / max(n * d, 1)))
        for start in range(0, points.shape[0], chunk):
            block = points[start:start + chunk]
            u = (block[:, None, :] - self.data[None, :, :]) / h
            out[start:start + chunk] = np.exp(-0.5 * (u * u).sum(axis=2)).sum(axis=1) / norm
        return out

    def sample(self, count: int, rng=None) -> np.ndarray:
        """Mixture sampling: uniform training row + per-dim kernel noise."""
        if count < 1:
            raise ValueError("count must be >= 1")
        if rng is None:
            rng = np.random.default_rng(self.seed)
        idx = rng.integers(0, self.data.shape[0], size=count)
        noise = rng.standard_normal((count, self.data.shape[1])) * self.bandwidths
        return self.data[idx] + noise


def fit_kde(subjective, seed: int) -> GaussianProductKde:
    """Fit the 8-attribute user-preference density."""
    subjective = np.asarray(subjective, dtype=np.float64)
    if subjective.ndim != 2 or subjective.shape[1] != N_SUBJECTIVE:
        raise ValueError(f"expected an (n, {N_SUBJECTIVE}) subjective matrix")
    return GaussianProductKde.fit(subjective, seed)


def sample_users(kde: GaussianProductKde, count: int = 100, rng=None) -> np.ndarray:
    """Simulated preference vectors, clamped into (0, 10]."""
    return clamp_scores(kde.sample(count, rng=rng))
