"""Dense MLP chains on top of the autodiff tape.

Each network is a list of (weight, bias, activation) layers; ``forward``
builds a tape for training, ``forward_np`` runs the identical arithmetic
without recording (used by inference paths, bit-for-bit equal results).
"""

from __future__ import annotations

import numpy as np

from . import tensor as T

ACTIVATIONS = ("linear", "softplus", "sigmoid")


class DenseLayer:
    __slots__ = ("w", "b", "activation")

    def __init__(self, w: np.ndarray, b: np.ndarray, activation: str):
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        if w.ndim != 2 or b.shape != (w.shape[1],):
            raise T.ShapeMismatchError(f"layer shapes {w.shape} / {b.shape}")
        self.w = T.Tensor(w)
        self.b = T.Tensor(b)
        self.activation = activation


class DenseNet:
    def __init__(self, layers: list[DenseLayer]):
        for prev, nxt in zip(layers, layers[1:]):
            if prev.w.shape[1] != nxt.w.shape[0]:
                raise T.ShapeMismatchError(
                    f"layer dimensions do not chain: {prev.w.shape} -> {nxt.w.shape}"
                )
        self.layers = layers

    @classmethod
    def create(cls, sizes: list[int], hidden_activation: str, out_activation: str,
               rng: np.random.Generator) -> "DenseNet":
        """Fan-in scaled uniform weights, zero biases."""
        layers = []
        for i, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
            bound = 1.0 / np.sqrt(n_in)
            w = rng.uniform(-bound, bound, size=(n_in, n_out))
            b = np.zeros(n_out)
            act = out_activation if i == len(sizes) - 2 else hidden_activation
            layers.append(DenseLayer(w, b, act))
        return cls(layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].w.shape[0]

    @property
    def out_dim(self) -> int:
        return self.layers[-1].w.shape[1]

    def params(self) -> list[T.Tensor]:
        out = []
        for layer in self.layers:
            out.append(layer.w)
            out.append(layer.b)
        return out

    def zero_grad(self) -> None:
        for p in self.params():
            p.grad = None

    def forward(self, x: T.Tensor) -> T.Tensor:
        if x.data.shape[-1] != self.in_dim:
            raise T.ShapeMismatchError(f"input dim {x.data.shape[-1]} != {self.in_dim}")
        h = x
        for layer in self.layers:
            h = T.add_bias(T.matmul(h, layer.w), layer.b)
            if layer.activation == "softplus":
                h = T.softplus(h)
            elif layer.activation == "sigmoid":
                h = T.sigmoid(h)
        return h

    def forward_np(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.in_dim:
            raise T.ShapeMismatchError(f"input dim {x.shape[-1]} != {self.in_dim}")
        h = x
        for layer in self.layers:
            h = h @ layer.w.data + layer.b.data
            if layer.activation == "softplus":
                h = T.softplus_np(h)
            elif layer.activation == "sigmoid":
                h = T.sigmoid_np(h)
        return h

    def gradients(self) -> list[np.ndarray]:
        return [np.zeros_like(p.data) if p.grad is None else p.grad for p in self.params()]

    def state(self) -> list[dict]:
        return [
            {"w": layer.w.data.tolist(), "b": layer.b.data.tolist(),
             "activation": layer.activation}
            for layer in self.layers
        ]

    @classmethod
    def from_state(cls, state: list[dict]) -> "DenseNet":
        return cls([
            DenseLayer(np.array(s["w"], dtype=np.float64),
                       np.array(s["b"], dtype=np.float64), s["activation"])
            for s in state
        ])

    def snapshot(self) -> list[np.ndarray]:
        return [p.data.copy() for p in self.params()]

    def restore(self, arrays: list[np.ndarray]) -> None:
        for p, a in zip(self.params(), arrays):
            if p.data.shape != a.shape:
                raise T.ShapeMismatchError(f"restore: {p.data.shape} vs {a.shape}")
            p.data = a.copy()
