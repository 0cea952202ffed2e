"""Minimal reverse-mode autodiff over float64 numpy arrays.

A Tensor records its parents and a backward closure; calling
:func:`backward` on a scalar loss topologically sorts the tape and
accumulates gradients into every reachable tensor's ``grad``.  The op set is
deliberately small: exactly what an MLP chain with Gaussian/multinomial
heads needs.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit


class ShapeMismatchError(ValueError):
    pass


class NonFiniteValueError(FloatingPointError):
    pass


class Tensor:
    __slots__ = ("data", "grad", "parents", "bwd")

    def __init__(self, data, parents=(), bwd=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.parents = parents
        self.bwd = bwd

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"


def _accum(t: Tensor, g: np.ndarray) -> None:
    """Accumulate a gradient the caller may still reference (copies on first write)."""
    if t.grad is None:
        t.grad = g.copy()
    else:
        t.grad += g


def _accum_own(t: Tensor, g: np.ndarray) -> None:
    """Accumulate a freshly allocated gradient the caller hands over."""
    if t.grad is None:
        t.grad = g
    else:
        t.grad += g


def _check_same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.data.shape != b.data.shape:
        raise ShapeMismatchError(f"{op}: {a.data.shape} vs {b.data.shape}")


def add(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "add")
    out = Tensor(a.data + b.data, (a, b))
    out.bwd = lambda g: (_accum(a, g), _accum(b, g))
    return out


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "sub")
    out = Tensor(a.data - b.data, (a, b))
    out.bwd = lambda g: (_accum(a, g), _accum_own(b, -g))
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "mul")
    out = Tensor(a.data * b.data, (a, b))
    out.bwd = lambda g: (_accum_own(a, g * b.data), _accum_own(b, g * a.data))
    return out


def neg(a: Tensor) -> Tensor:
    out = Tensor(-a.data, (a,))
    out.bwd = lambda g: _accum_own(a, -g)
    return out


def scale(a: Tensor, s: float) -> Tensor:
    out = Tensor(a.data * s, (a,))
    out.bwd = lambda g: _accum_own(a, g * s)
    return out


def add_scalar(a: Tensor, s: float) -> Tensor:
    out = Tensor(a.data + s, (a,))
    out.bwd = lambda g: _accum(a, g)
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape[-1] != b.data.shape[0]:
        raise ShapeMismatchError(f"matmul: {a.data.shape} @ {b.data.shape}")
    out = Tensor(a.data @ b.data, (a, b))
    out.bwd = lambda g: (_accum_own(a, g @ b.data.T), _accum_own(b, a.data.T @ g))
    return out


def add_bias(a: Tensor, b: Tensor) -> Tensor:
    """(batch, n) + (n,) broadcast; bias gradient sums over the batch axis."""
    if a.data.shape[-1] != b.data.shape[0] or b.data.ndim != 1:
        raise ShapeMismatchError(f"add_bias: {a.data.shape} + {b.data.shape}")
    out = Tensor(a.data + b.data, (a, b))
    out.bwd = lambda g: (_accum(a, g),
                         _accum_own(b, g.sum(axis=0)) if g.ndim > 1 else _accum(b, g))
    return out


def exp(a: Tensor) -> Tensor:
    out = Tensor(np.exp(a.data), (a,))
    out.bwd = lambda g: _accum_own(a, g * out.data)
    return out


def log(a: Tensor) -> Tensor:
    out = Tensor(np.log(a.data), (a,))
    out.bwd = lambda g: _accum_own(a, g / a.data)
    return out


def sigmoid_np(x: np.ndarray) -> np.ndarray:
    return expit(x)


def softplus_np(x: np.ndarray) -> np.ndarray:
    return np.log1p(np.exp(-np.abs(x))) + np.maximum(x, 0.0)


def sigmoid(a: Tensor) -> Tensor:
    out = Tensor(sigmoid_np(a.data), (a,))
    out.bwd = lambda g: _accum_own(a, g * out.data * (1.0 - out.data))
    return out


def softplus(a: Tensor) -> Tensor:
    t = np.exp(-np.abs(a.data))
    out = Tensor(np.log1p(t) + np.maximum(a.data, 0.0), (a,))

    def bwd(g):
        # sigmoid recovered from the cached exp(-|x|)
        sig = np.where(a.data >= 0.0, 1.0, t)
        sig /= 1.0 + t
        _accum_own(a, g * sig)

    out.bwd = bwd
    return out


def softmax_np(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax_np(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def log_softmax(a: Tensor) -> Tensor:
    out = Tensor(log_softmax_np(a.data), (a,))

    def bwd(g):
        _accum_own(a, g - np.exp(out.data) * g.sum(axis=-1, keepdims=True))

    out.bwd = bwd
    return out


def concat_cols(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape[:-1] != b.data.shape[:-1]:
        raise ShapeMismatchError(f"concat_cols: {a.data.shape} vs {b.data.shape}")
    na = a.data.shape[-1]
    out = Tensor(np.concatenate([a.data, b.data], axis=-1), (a, b))
    out.bwd = lambda g: (_accum(a, g[..., :na]), _accum(b, g[..., na:]))
    return out


def slice_cols(a: Tensor, lo: int, hi: int) -> Tensor:
    out = Tensor(a.data[..., lo:hi], (a,))

    def bwd(g):
        full = np.zeros_like(a.data)
        full[..., lo:hi] = g
        _accum_own(a, full)

    out.bwd = bwd
    return out


def sum_all(a: Tensor) -> Tensor:
    out = Tensor(a.data.sum(), (a,))
    out.bwd = lambda g: _accum_own(a, np.full_like(a.data, float(g)))
    return out


def backward(loss: Tensor) -> None:
    """Accumulate d(loss)/d(t) into every tensor t reachable from ``loss``.

    ``loss`` must be a scalar.  Callers are responsible for clearing ``grad``
    on reused leaves (parameters) between tapes.
    """
    if loss.data.shape != ():
        raise ShapeMismatchError(f"backward needs a scalar loss, got {loss.data.shape}")
    if not np.isfinite(loss.data):
        raise NonFiniteValueError("loss is not finite")
    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones((), dtype=np.float64)
    for node in reversed(topo):
        if node.bwd is not None and node.grad is not None:
            node.bwd(node.grad)
