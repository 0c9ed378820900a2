"""Random forest for multi-target regression, built from first principles.

Each tree is a single multi-output CART grown on a bootstrap sample.
Splits minimize the summed per-target squared error (variance reduction
over all eight targets at once); forest prediction is the mean of tree
predictions. Per-tree RNG streams are spawned deterministically from the
master seed, so results are bit-identical regardless of how trees would
be scheduled.

Binary (one-hot) columns are scored in a single matrix product per node;
the few continuous columns use a sorted prefix-sum scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SSE_EPS = 1e-12


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 20
    max_depth: int | None = None
    min_samples_leaf: int = 1
    features_per_split: object = "all"  # "all" | "sqrt" | positive int
    bootstrap: bool = True
    seed: int = 0

    def validate(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if isinstance(self.features_per_split, str):
            if self.features_per_split not in ("all", "sqrt"):
                raise ValueError("features_per_split must be 'all', 'sqrt', or an int")
        elif int(self.features_per_split) < 1:
            raise ValueError("features_per_split int must be >= 1")


def _group_sse(n, sums, squares):
    """Summed per-target SSE of groups given counts, sums, sums of squares."""
    n = np.asarray(n, dtype=np.float64)
    safe = np.maximum(n, 1.0)
    sse = squares.sum(axis=-1) - (sums * sums).sum(axis=-1) / safe
    sse = np.where(n > 0, sse, 0.0)
    return np.maximum(sse, 0.0)


class DecisionTree:
    """One multi-output CART. Grown by RandomForest; array-based storage."""

    def __init__(self, n_outputs: int):
        self.n_outputs = n_outputs
        self.feature: list = []  # -1 marks a leaf
        self.threshold: list = []
        self.left: list = []
        self.right: list = []
        self.value: list = []  # leaf mean vectors; None for internal nodes

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(None)
        return len(self.feature) - 1

    def fit(self, X, Y, cfg: ForestConfig, rng, importances=None):
        n, p = X.shape
        is_binary = np.array([set(np.unique(X[:, j])) <= {0.0, 1.0} for j in range(p)])
        if cfg.features_per_split == "all":
            n_candidates = p
        elif cfg.features_per_split == "sqrt":
            n_candidates = max(1, int(np.sqrt(p)))
        else:
            n_candidates = min(int(cfg.features_per_split), p)

        if cfg.bootstrap:
            rows = rng.integers(0, n, size=n)
        else:
            rows = np.arange(n)

        root = self._new_node()
        stack = [(root, rows, 0)]
        while stack:
            node, idx, depth = stack.pop()
            Ysub = Y[idx]
            k = idx.size
            sums = Ysub.sum(axis=0)
            squares = (Ysub * Ysub).sum(axis=0)
            sse_total = float(_group_sse(k, sums, squares))
            mean = sums / k
            if (
                sse_total <= _SSE_EPS
                or k < 2 * cfg.min_samples_leaf
                or (cfg.max_depth is not None and depth >= cfg.max_depth)
            ):
                self.value[node] = mean
                continue

            if n_candidates >= p:
                candidates = np.arange(p)
            else:
                candidates = np.sort(rng.choice(p, size=n_candidates, replace=False))

            best = self._best_split(
                X, Ysub, idx, candidates, is_binary, cfg.min_samples_leaf,
                k, sums, squares, sse_total,
            )
            if best is None:
                self.value[node] = mean
                continue

            reduction, feat, thr = best
            if importances is not None:
                importances[feat] += reduction
            go_left = X[idx, feat] <= thr
            left_node = self._new_node()
            right_node = self._new_node()
            self.feature[node] = feat
            self.threshold[node] = thr
            self.left[node] = left_node
            self.right[node] = right_node
            stack.append((right_node, idx[~go_left], depth + 1))
            stack.append((left_node, idx[go_left], depth + 1))
        return self

    def _best_split(self, X, Ysub, idx, candidates, is_binary, min_leaf,
                    k, sums, squares, sse_total):
        best_red = _SSE_EPS
        best_feat = -1
        best_thr = 0.0

        bin_cand = candidates[is_binary[candidates]]
        if bin_cand.size:
            B = X[np.ix_(idx, bin_cand)]
            n1 = B.sum(axis=0)
            n0 = k - n1
            S1 = B.T @ Ysub
            Q1 = B.T @ (Ysub * Ysub)
            sse_children = (
                _group_sse(n0, sums - S1, squares - Q1) + _group_sse(n1, S1, Q1)
            )
            red = sse_total - sse_children
            red[(n0 < min_leaf) | (n1 < min_leaf)] = -np.inf
            j = int(np.argmax(red))
            if red[j] > best_red:
                best_red = float(red[j])
                best_feat = int(bin_cand[j])
                best_thr = 0.5

        for feat in candidates[~is_binary[candidates]]:
            x = X[idx, feat]
            order = np.argsort(x, kind="stable")
            xs = x[order]
            if xs[0] == xs[-1]:
                continue
            Ys = Ysub[order]
            cs = np.cumsum(Ys, axis=0)
            cq = np.cumsum(Ys * Ys, axis=0)
            nl = np.arange(1, k)
            Sl, Ql = cs[:-1], cq[:-1]
            sse_children = _group_sse(nl, Sl, Ql) + _group_sse(k - nl, sums - Sl, squares - Ql)
            red = sse_total - sse_children
            invalid = (xs[1:] <= xs[:-1]) | (nl < min_leaf) | (k - nl < min_leaf)
            red[invalid] = -np.inf
            i = int(np.argmax(red))
            if red[i] > best_red or (
                red[i] == best_red and best_feat >= 0 and feat < best_feat
            ):
                best_red = float(red[i])
                best_feat = int(feat)
                best_thr = float((xs[i] + xs[i + 1]) / 2.0)

        if best_feat < 0:
            return None
        return best_red, best_feat, best_thr

    def predict(self, X) -> np.ndarray:
        out = np.empty((X.shape[0], self.n_outputs), dtype=np.float64)
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            feat = self.feature[node]
            if feat < 0:
                out[rows] = self.value[node]
                continue
            go_left = X[rows, feat] <= self.threshold[node]
            stack.append((self.left[node], rows[go_left]))
            stack.append((self.right[node], rows[~go_left]))
        return out

    def to_dict(self) -> dict:
        return {
            "feature": [int(f) for f in self.feature],
            "threshold": [float(t) for t in self.threshold],
            "left": [int(i) for i in self.left],
            "right": [int(i) for i in self.right],
            "value": [None if v is None else [float(x) for x in v] for v in self.value],
        }

    @classmethod
    def from_dict(cls, payload: dict, n_outputs: int) -> "DecisionTree":
        tree = cls(n_outputs)
        tree.feature = list(payload["feature"])
        tree.threshold = list(payload["threshold"])
        tree.left = list(payload["left"])
        tree.right = list(payload["right"])
        tree.value = [
            None if v is None else np.array(v, dtype=np.float64) for v in payload["value"]
        ]
        return tree


class RandomForest:
    """Bootstrap ensemble of multi-output CARTs with averaged predictions."""

    def __init__(self, cfg: ForestConfig):
        cfg.validate()
        self.cfg = cfg
        self.trees: list = []
        self.n_features = 0
        self.n_outputs = 0
        self._importance_raw = None

    def fit(self, X, Y) -> "RandomForest":
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
            raise ValueError("X and Y must be 2-d with matching row counts")
        if X.shape[0] < 2:
            raise ValueError("forest training needs at least 2 rows")
        if np.isnan(X).any() or np.isnan(Y).any():
            raise ValueError("NaN values in training data")
        self.n_features = X.shape[1]
        self.n_outputs = Y.shape[1]
        self._importance_raw = np.zeros(self.n_features)
        streams = np.random.SeedSequence(self.cfg.seed).spawn(self.cfg.n_trees)
        self.trees = []
        for stream in streams:
            rng = np.random.default_rng(stream)
            tree = DecisionTree(self.n_outputs)
            tree.fit(X, Y, self.cfg, rng, importances=self._importance_raw)
            self.trees.append(tree)
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if not self.trees:
            raise ValueError("forest is not fitted")
        total = np.zeros((X.shape[0], self.n_outputs))
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def feature_importances(self):
        """Normalized impurity-reduction importances (sum to 1); all-zero with a
        degenerate flag when no split ever reduced impurity."""
        raw = self._importance_raw
        if raw is None:
            raise ValueError("forest is not fitted")
        total = raw.sum()
        if total <= 0.0:
            return np.zeros_like(raw), True
        return raw / total, False

    def to_dict(self) -> dict:
        return {
            "n_features": self.n_features,
            "n_outputs": self.n_outputs,
            "importance_raw": [float(x) for x in self._importance_raw],
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, payload: dict, cfg: ForestConfig) -> "RandomForest":
        forest = cls(cfg)
        forest.n_features = int(payload["n_features"])
        forest.n_outputs = int(payload["n_outputs"])
        forest._importance_raw = np.array(payload["importance_raw"], dtype=np.float64)
        forest.trees = [
            DecisionTree.from_dict(t, forest.n_outputs) for t in payload["trees"]
        ]
        return forest
