"""Fully connected multi-layer perceptron trained with Adam on RMSE loss.

Hidden layers use rectified-linear activations with an inverted dropout
mask between successive layers (active only during training); the output
layer is linear. Initialization is scaled-uniform fan-in; the init and
batching/dropout RNG streams are spawned from the master seed so a fit
is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MlpDivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MlpConfig:
    hidden_layers: tuple = (256, 256, 256)
    dropout_rate: float = 0.2
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    epochs: int = 200
    batch_size: int = 32
    seed: int = 0

    def validate(self):
        if not self.hidden_layers:
            raise ValueError("need at least one hidden layer")
        if any(int(w) < 1 for w in self.hidden_layers):
            raise ValueError("hidden layer widths must be >= 1")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")


class AdamOptimizer:
    """Adam with bias correction; one slot pair per parameter array."""

    def __init__(self, shapes, learning_rate, beta1=0.9, beta2=0.999, eps=1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            m_hat = m / (1 - b1 ** self.t)
            v_hat = v / (1 - b2 ** self.t)
            p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class Mlp:
    cfg: MlpConfig
    n_inputs: int = 0
    n_outputs: int = 0
    weights: list = field(default_factory=list)
    biases: list = field(default_factory=list)
    loss_curve: list = field(default_factory=list)

    def _init_params(self, n_inputs, n_outputs, rng):
        sizes = [n_inputs] + [int(w) for w in self.cfg.hidden_layers] + [n_outputs]
        self.n_inputs = n_inputs
        self.n_outputs = n_outputs
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / fan_in)
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    def _forward(self, X, train, rng=None):
        """Returns (output, per-layer inputs, dropout masks)."""
        p = self.cfg.dropout_rate
        inputs = []
        masks = []
        a = X
        last = len(self.weights) - 1
        for layer, (W, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(a)
            zed = a @ W + b
            if layer == last:
                a = zed
                continue
            a = np.maximum(zed, 0.0)
            if train and p > 0.0:
                mask = (rng.random(a.shape) >= p) / (1.0 - p)
                a = a * mask
                masks.append(mask)
            else:
                masks.append(None)
        return a, inputs, masks

    def loss_and_grads(self, X, Y, train=False, rng=None):
        """RMSE loss over the batch plus gradients for every W and b."""
        out, inputs, masks = self._forward(X, train, rng)
        resid = out - Y
        loss = float(np.sqrt(np.mean(resid * resid)))
        grad_ws = [None] * len(self.weights)
        grad_bs = [None] * len(self.biases)
        if loss < 1e-15:
            for layer, W in enumerate(self.weights):
                grad_ws[layer] = np.zeros_like(W)
                grad_bs[layer] = np.zeros_like(self.biases[layer])
            return loss, grad_ws, grad_bs
        delta = resid / (resid.size * loss)
        for layer in range(len(self.weights) - 1, -1, -1):
            a_in = inputs[layer]
            grad_ws[layer] = a_in.T @ delta
            grad_bs[layer] = delta.sum(axis=0)
            if layer == 0:
                break
            delta = delta @ self.weights[layer].T
            mask = masks[layer - 1]
            if mask is not None:
                delta = delta * mask
            # ReLU derivative on the post-activation of the previous layer:
            # a_in > 0 iff pre-activation > 0 when no dropout zeroed it; with
            # dropout, zeroed units also have zero incoming gradient flow.
            delta = delta * (a_in > 0.0)
        return loss, grad_ws, grad_bs

    def fit(self, X, Y) -> "Mlp":
        self.cfg.validate()
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if X.shape[0] < 2:
            raise ValueError("MLP training needs at least 2 rows")
        if np.isnan(X).any() or np.isnan(Y).any():
            raise ValueError("NaN values in training data")
        init_stream, train_stream = np.random.SeedSequence(self.cfg.seed).spawn(2)
        init_rng = np.random.default_rng(init_stream)
        train_rng = np.random.default_rng(train_stream)
        self._init_params(X.shape[1], Y.shape[1], init_rng)

        shapes = [w.shape for w in self.weights] + [b.shape for b in self.biases]
        adam = AdamOptimizer(
            shapes, self.cfg.learning_rate, self.cfg.beta1, self.cfg.beta2,
            self.cfg.adam_eps,
        )
        n = X.shape[0]
        batch = min(self.cfg.batch_size, n)
        self.loss_curve = []
        for epoch in range(self.cfg.epochs):
            order = train_rng.permutation(n)
            epoch_losses = []
            for start in range(0, n, batch):
                rows = order[start:start + batch]
                loss, grad_ws, grad_bs = self.loss_and_grads(
                    X[rows], Y[rows], train=True, rng=train_rng
                )
                if not np.isfinite(loss):
                    raise MlpDivergenceError(
                        f"training loss diverged (learning_rate="
                        f"{self.cfg.learning_rate}, epoch={epoch})"
                    )
                epoch_losses.append(loss)
                adam.step(self.weights + self.biases, grad_ws + grad_bs)
            self.loss_curve.append(float(np.mean(epoch_losses)))
        return self

    def predict(self, X) -> np.ndarray:
        if not self.weights:
            raise ValueError("MLP is not fitted")
        X = np.asarray(X, dtype=np.float64)
        out, _, _ = self._forward(X, train=False)
        return out

    def to_dict(self) -> dict:
        return {
            "n_inputs": self.n_inputs,
            "n_outputs": self.n_outputs,
            "weights": [[[float(v) for v in row] for row in W] for W in self.weights],
            "biases": [[float(v) for v in b] for b in self.biases],
            "loss_curve": [float(v) for v in self.loss_curve],
        }

    @classmethod
    def from_dict(cls, payload: dict, cfg: MlpConfig) -> "Mlp":
        mlp = cls(cfg=cfg)
        mlp.n_inputs = int(payload["n_inputs"])
        mlp.n_outputs = int(payload["n_outputs"])
        mlp.weights = [np.array(W, dtype=np.float64) for W in payload["weights"]]
        mlp.biases = [np.array(b, dtype=np.float64) for b in payload["biases"]]
        mlp.loss_curve = list(payload["loss_curve"])
        return mlp
