"""Small text classifiers with hand-written backpropagation.

Both models read a sentence as an (L, D) array of frozen word vectors and
produce 22 logits:

* ``CnnModel``: one bank of F filters per width in {2, 3, 4}; valid 1-D
  convolution over token positions, ReLU, max over time, concatenation, then
  a dense layer.
* ``RnnModel``: Elman recurrence ``h_t = tanh(x_t Wxh + h_{t-1} Whh + bh)``
  whose last state feeds a dense layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from kasper.intent.classes import N_CLASSES, Prediction

CNN_WIDTHS = (2, 3, 4)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits)
    e = np.exp(z)
    return e / e.sum()


def cross_entropy(logits: np.ndarray, target: int) -> float:
    z = logits - np.max(logits)
    return float(np.log(np.exp(z).sum()) - z[target])


@dataclass
class CnnModel:
    dim: int
    filters: int
    params: dict[str, np.ndarray]
    widths: tuple[int, ...] = CNN_WIDTHS
    kind: str = field(default="cnn", init=False)

    @classmethod
    def init(cls, dim: int, filters: int = 16, seed: int = 0, widths=CNN_WIDTHS) -> "CnnModel":
        rng = np.random.default_rng(seed)
        params = {}
        for w in widths:
            fan_in = w * dim
            params[f"conv{w}.W"] = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, filters))
            params[f"conv{w}.b"] = np.zeros(filters)
        hidden = filters * len(widths)
        params["dense.W"] = rng.normal(0.0, np.sqrt(1.0 / hidden), size=(hidden, N_CLASSES))
        params["dense.b"] = np.zeros(N_CLASSES)
        return cls(dim, filters, params, tuple(widths))

    def _windows(self, x: np.ndarray, w: int) -> np.ndarray:
        if x.shape[0] < w:
            x = np.vstack([x, np.zeros((w - x.shape[0], self.dim))])
        # (positions, w, D) -> (positions, w*D), rows are concatenated token vectors
        return sliding_window_view(x, (w, self.dim))[:, 0].reshape(-1, w * self.dim)

    def _forward(self, x: np.ndarray):
        cache = []
        pooled = []
        for w in self.widths:
            win = self._windows(x, w)
            z = win @ self.params[f"conv{w}.W"] + self.params[f"conv{w}.b"]
            a = np.maximum(z, 0.0)
            pos = np.argmax(a, axis=0)
            pooled.append(a[pos, np.arange(self.filters)])
            cache.append((w, win, z, pos))
        h = np.concatenate(pooled)
        logits = h @ self.params["dense.W"] + self.params["dense.b"]
        return logits, (h, cache)

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self._forward(x)[0]

    def pooled(self, x: np.ndarray) -> np.ndarray:
        return self._forward(x)[1][0]

    def loss_and_grads(self, x: np.ndarray, target: int) -> tuple[float, dict[str, np.ndarray]]:
        logits, (h, cache) = self._forward(x)
        probs = softmax(logits)
        loss = cross_entropy(logits, target)
        dlogits = probs.copy()
        dlogits[target] -= 1.0
        grads = {"dense.W": np.outer(h, dlogits), "dense.b": dlogits}
        dh = self.params["dense.W"] @ dlogits
        F = self.filters
        for bank, (w, win, z, pos) in enumerate(cache):
            dp = dh[bank * F:(bank + 1) * F]
            cols = np.arange(F)
            # only the pooled position of each filter receives gradient, and only through an active ReLU
            dz = dp * (z[pos, cols] > 0)
            grads[f"conv{w}.W"] = win[pos].T * dz
            grads[f"conv{w}.b"] = dz
        return loss, grads


@dataclass
class RnnModel:
    dim: int
    hidden: int
    params: dict[str, np.ndarray]
    kind: str = field(default="rnn", init=False)

    @classmethod
    def init(cls, dim: int, hidden: int = 32, seed: int = 0) -> "RnnModel":
        rng = np.random.default_rng(seed)
        params = {
            "Wxh": rng.normal(0.0, np.sqrt(1.0 / dim), size=(dim, hidden)),
            "Whh": rng.normal(0.0, np.sqrt(1.0 / hidden), size=(hidden, hidden)),
            "bh": np.zeros(hidden),
            "Why": rng.normal(0.0, np.sqrt(1.0 / hidden), size=(hidden, N_CLASSES)),
            "by": np.zeros(N_CLASSES),
        }
        return cls(dim, hidden, params)

    def _forward(self, x: np.ndarray):
        p = self.params
        hs = [np.zeros(self.hidden)]
        for xt in x:
            hs.append(np.tanh(xt @ p["Wxh"] + hs[-1] @ p["Whh"] + p["bh"]))
        logits = hs[-1] @ p["Why"] + p["by"]
        return logits, hs

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self._forward(x)[0]

    def loss_and_grads(self, x: np.ndarray, target: int) -> tuple[float, dict[str, np.ndarray]]:
        p = self.params
        logits, hs = self._forward(x)
        probs = softmax(logits)
        loss = cross_entropy(logits, target)
        dlogits = probs.copy()
        dlogits[target] -= 1.0
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        grads["Why"] = np.outer(hs[-1], dlogits)
        grads["by"] = dlogits
        dh = p["Why"] @ dlogits
        for t in range(len(x) - 1, -1, -1):
            da = dh * (1.0 - hs[t + 1] ** 2)
            grads["Wxh"] += np.outer(x[t], da)
            grads["Whh"] += np.outer(hs[t], da)
            grads["bh"] += da
            dh = p["Whh"] @ da
        return loss, grads


Model = CnnModel | RnnModel


def predict_array(model: Model, x: np.ndarray) -> Prediction:
    return Prediction.from_distribution(softmax(model.logits(x)))


def loss_only(model: Model, x: np.ndarray, target: int) -> float:
    return cross_entropy(model.logits(x), target)
