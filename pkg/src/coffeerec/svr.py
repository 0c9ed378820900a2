"""Epsilon-insensitive support vector regression trained by SMO.

One independent RBF-kernel model per subjective attribute, each with its
own (C, gamma). The dual is solved over the 2n stacked variables
theta = (alpha, alpha_star) with the equality constraint
sum(alpha - alpha_star) = 0 and box [0, C], using maximal-violating-pair
working-set selection with a second-order refinement for the partner
variable. The solver is fully deterministic (no RNG).

Dual objective (minimized), beta = alpha - alpha_star:
    W(theta) = 1/2 beta' K beta + eps * sum(alpha + alpha_star) - y' beta
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

_TAU = 1e-12


@dataclass(frozen=True)
class TargetSvrParams:
    C: float
    gamma: float

    def validate(self):
        if self.C <= 0:
            raise ValueError(f"penalty C must be positive, got {self.C}")
        if self.gamma <= 0:
            raise ValueError(f"RBF gamma must be positive, got {self.gamma}")


# Frozen by a one-time grid search (C in {1, 10, 100}, gamma in
# {0.01, 0.1, 1}) minimizing 10-fold CV RMSE per attribute on the bundled
# dataset; see grid_search_svr. Order follows SUBJECTIVE_ATTRIBUTES.
DEFAULT_PER_TARGET = (
    TargetSvrParams(C=10.0, gamma=0.1),  # aroma
    TargetSvrParams(C=10.0, gamma=0.1),  # flavour
    TargetSvrParams(C=10.0, gamma=0.1),  # body
    TargetSvrParams(C=10.0, gamma=0.1),  # sweetness
    TargetSvrParams(C=10.0, gamma=0.1),  # acidity
    TargetSvrParams(C=10.0, gamma=0.1),  # balance
    TargetSvrParams(C=10.0, gamma=0.1),  # uniformity
    TargetSvrParams(C=10.0, gamma=0.1),  # aftertaste
)


@dataclass(frozen=True)
class SvrConfig:
    per_target: tuple = None  # one TargetSvrParams per target; None -> defaults
    epsilon: float = 0.1
    tol: float = 1e-3
    max_iter: int = 200_000

    def validate(self, n_targets: int):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        params = self.resolved(n_targets)
        for p in params:
            p.validate()

    def resolved(self, n_targets: int) -> tuple:
        if self.per_target is None:
            if n_targets == len(DEFAULT_PER_TARGET):
                return DEFAULT_PER_TARGET
            return tuple(TargetSvrParams(C=10.0, gamma=0.1) for _ in range(n_targets))
        if len(self.per_target) != n_targets:
            raise ValueError(
                f"need {n_targets} per-target (C, gamma) pairs, got {len(self.per_target)}"
            )
        return tuple(self.per_target)


@dataclass
class SmoResult:
    beta: np.ndarray
    bias: float
    alpha: np.ndarray
    alpha_star: np.ndarray
    iterations: int
    converged: bool
    violation: float  # final m - M KKT gap


def smo_solve(K, y, C, epsilon, tol=1e-3, max_iter=200_000) -> SmoResult:
    """Solve the epsilon-SVR dual for one target given the kernel matrix."""
    n = y.shape[0]
    z = np.concatenate([np.ones(n), -np.ones(n)])
    theta = np.zeros(2 * n)
    grad = np.concatenate([epsilon - y, epsilon + y])
    diag2 = np.concatenate([np.diag(K), np.diag(K)])

    iterations = 0
    converged = False
    violation = np.inf
    while iterations < max_iter:
        vals = -z * grad
        up = ((z > 0) & (theta < C)) | ((z < 0) & (theta > 0))
        low = ((z < 0) & (theta < C)) | ((z > 0) & (theta > 0))
        up_vals = np.where(up, vals, -np.inf)
        low_vals = np.where(low, vals, np.inf)
        i = int(np.argmax(up_vals))
        m = up_vals[i]
        M = low_vals.min()
        violation = m - M
        if violation <= tol:
            converged = True
            break

        # Second-order partner choice among sufficiently violating candidates.
        k_i = np.tile(K[:, i % n], 2)
        b_vec = m - vals
        a_vec = diag2[i] + diag2 - 2.0 * k_i
        a_vec = np.maximum(a_vec, _TAU)
        gain = np.where(low & (b_vec > 0), -(b_vec * b_vec) / a_vec, np.inf)
        j = int(np.argmin(gain))
        if not np.isfinite(gain[j]):
            j = int(np.argmin(low_vals))

        s = z[i] * z[j]
        quad = max(diag2[i] + diag2[j] - 2.0 * K[i % n, j % n], _TAU)
        delta = z[i] * (m - vals[j]) / quad
        # Box for theta_i and the coupled theta_j move (delta_j = -s * delta).
        lo = -theta[i]
        hi = C - theta[i]
        if s > 0:
            lo = max(lo, theta[j] - C)
            hi = min(hi, theta[j])
        else:
            lo = max(lo, -theta[j])
            hi = min(hi, C - theta[j])
        delta = min(max(delta, lo), hi)
        if abs(delta) < 1e-15:
            break  # numerically stalled at the box

        theta[i] += delta
        theta[j] -= s * delta
        theta[i] = min(max(theta[i], 0.0), C)
        theta[j] = min(max(theta[j], 0.0), C)

        k_j = np.tile(K[:, j % n], 2)
        combined = z[i] * delta * k_i + z[j] * (-s * delta) * k_j
        grad += z * combined
        iterations += 1

    alpha = theta[:n].copy()
    alpha_star = theta[n:].copy()
    beta = alpha - alpha_star

    free = (theta > 0.0) & (theta < C)
    vals = -z * grad
    if free.any():
        bias = float(vals[free].mean())
    else:
        up = ((z > 0) & (theta < C)) | ((z < 0) & (theta > 0))
        low = ((z < 0) & (theta < C)) | ((z > 0) & (theta > 0))
        hi = np.where(up, vals, -np.inf).max()
        lo = np.where(low, vals, np.inf).min()
        if not np.isfinite(hi):
            hi = lo
        if not np.isfinite(lo):
            lo = hi
        bias = float((hi + lo) / 2.0)

    return SmoResult(
        beta=beta,
        bias=bias,
        alpha=alpha,
        alpha_star=alpha_star,
        iterations=iterations,
        converged=converged,
        violation=float(violation),
    )


def pairwise_sq_dists(A, B) -> np.ndarray:
    a2 = (A * A).sum(axis=1)[:, None]
    b2 = (B * B).sum(axis=1)[None, :]
    return np.maximum(a2 + b2 - 2.0 * (A @ B.T), 0.0)


class SvrEnsemble:
    """One epsilon-SVR per target sharing the training matrix."""

    def __init__(self, cfg: SvrConfig):
        self.cfg = cfg
        self.X_train = None
        self.targets: list = []  # per target: dict(indices, beta, bias, params, ...)

    def fit(self, X, Y) -> "SvrEnsemble":
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if X.shape[0] < 2:
            raise ValueError("SVR training needs at least 2 rows")
        if np.isnan(X).any() or np.isnan(Y).any():
            raise ValueError("NaN values in training data")
        n_targets = Y.shape[1]
        self.cfg.validate(n_targets)
        params = self.cfg.resolved(n_targets)
        self.X_train = X
        D = pairwise_sq_dists(X, X)
        self.targets = []
        for t in range(n_targets):
            K = np.exp(-params[t].gamma * D)
            result = smo_solve(
                K, Y[:, t], params[t].C, self.cfg.epsilon,
                tol=self.cfg.tol, max_iter=self.cfg.max_iter,
            )
            if not result.converged:
                warnings.warn(
                    f"SVR target {t} did not converge within {self.cfg.max_iter} "
                    f"iterations (KKT gap {result.violation:.3g}); using best iterate"
                )
            sv = np.flatnonzero(np.abs(result.beta) > 1e-12)
            self.targets.append(
                {
                    "params": params[t],
                    "sv_indices": sv,
                    "sv_beta": result.beta[sv],
                    "bias": result.bias,
                    "converged": bool(result.converged),
                    "violation": result.violation,
                    "iterations": result.iterations,
                }
            )
        return self

    def predict(self, X) -> np.ndarray:
        if self.X_train is None:
            raise ValueError("SVR ensemble is not fitted")
        X = np.asarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], len(self.targets)))
        for t, model in enumerate(self.targets):
            sv = model["sv_indices"]
            if sv.size == 0:
                out[:, t] = model["bias"]
                continue
            D = pairwise_sq_dists(X, self.X_train[sv])
            out[:, t] = np.exp(-model["params"].gamma * D) @ model["sv_beta"] + model["bias"]
        return out

    def to_dict(self) -> dict:
        return {
            "X_train": [[float(v) for v in row] for row in self.X_train],
            "targets": [
                {
                    "C": model["params"].C,
                    "gamma": model["params"].gamma,
                    "sv_indices": [int(i) for i in model["sv_indices"]],
                    "sv_beta": [float(b) for b in model["sv_beta"]],
                    "bias": float(model["bias"]),
                    "converged": model["converged"],
                    "violation": float(model["violation"]),
                    "iterations": int(model["iterations"]),
                }
                for model in self.targets
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict, cfg: SvrConfig) -> "SvrEnsemble":
        ens = cls(cfg)
        ens.X_train = np.array(payload["X_train"], dtype=np.float64)
        ens.targets = [
            {
                "params": TargetSvrParams(C=float(t["C"]), gamma=float(t["gamma"])),
                "sv_indices": np.array(t["sv_indices"], dtype=np.int64),
                "sv_beta": np.array(t["sv_beta"], dtype=np.float64),
                "bias": float(t["bias"]),
                "converged": bool(t["converged"]),
                "violation": float(t["violation"]),
                "iterations": int(t["iterations"]),
            }
            for t in payload["targets"]
        ]
        return ens


def grid_search_svr(X, Y, Cs=(1.0, 10.0, 100.0), gammas=(0.01, 0.1, 1.0),
                    folds=10, seed=0, epsilon=0.1, tol=1e-3, max_iter=200_000):
    """Pick (C, gamma) per target by k-fold CV RMSE on the given matrices.

    Ties break toward the earlier point in the declared grid order. This
    is the offline calibration behind DEFAULT_PER_TARGET.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    n, n_targets = Y.shape
    if folds < 2 or folds > n:
        raise ValueError("need 2 <= folds <= n")
    rng = np.random.default_rng(seed)
    assignment = np.array_split(rng.permutation(n), folds)
    grid = [(C, gamma) for C in Cs for gamma in gammas]
    D = pairwise_sq_dists(X, X)

    best = []
    for t in range(n_targets):
        scores = []
        for C, gamma in grid:
            K = np.exp(-gamma * D)
            sq_sum = 0.0
            count = 0
            for val_idx in assignment:
                mask = np.ones(n, dtype=bool)
                mask[val_idx] = False
                tr = np.flatnonzero(mask)
                result = smo_solve(
                    K[np.ix_(tr, tr)], Y[tr, t], C, epsilon, tol=tol, max_iter=max_iter
                )
                sv = np.flatnonzero(np.abs(result.beta) > 1e-12)
                if sv.size:
                    pred = K[np.ix_(val_idx, tr[sv])] @ result.beta[sv] + result.bias
                else:
                    pred = np.full(val_idx.size, result.bias)
                sq_sum += float(((pred - Y[val_idx, t]) ** 2).sum())
                count += val_idx.size
            scores.append(np.sqrt(sq_sum / count))
        winner = int(np.argmin(scores))  # first minimum = earlier grid point
        best.append(TargetSvrParams(C=grid[winner][0], gamma=grid[winner][1]))
    return tuple(best)
