"""Adam with bias correction and a reduce-on-plateau learning-rate schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensor import ShapeMismatchError, Tensor


@dataclass
class AdamState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    scratch: list = field(default_factory=list)

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")


def adam_step(state: AdamState, params: list[Tensor], grads: list[np.ndarray]) -> None:
    """In-place Adam update of ``params`` from ``grads``."""
    if len(params) != len(grads):
        raise ShapeMismatchError("params/grads length mismatch")
    if not state.m:
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
        state.scratch = [np.empty_like(p.data) for p in params]
    state.step += 1
    b1c = 1.0 - state.beta1 ** state.step
    b2c = 1.0 - state.beta2 ** state.step
    for p, g, m, v, scr in zip(params, grads, state.m, state.v, state.scratch):
        if p.data.shape != g.shape:
            raise ShapeMismatchError(f"adam_step: {p.data.shape} vs {g.shape}")
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        np.multiply(g, g, out=scr)
        scr *= 1.0 - state.beta2
        v += scr
        np.divide(v, b2c, out=scr)
        np.sqrt(scr, out=scr)
        scr += state.eps
        np.divide(m, scr, out=scr)
        scr *= state.lr / b1c
        # in-place so parameter buffers (and any views into them) survive
        p.data -= scr


@dataclass
class PlateauSchedule:
    """Halve the learning rate after ``patience`` consecutive updates without
    a strict metric improvement; the rate never increases and never drops
    below ``min_lr``."""

    lr: float
    factor: float = 0.5
    patience: int = 200
    min_lr: float = 0.0
    best_metric: float = -math.inf
    wait: int = 0

    def update(self, metric: float) -> float:
        if not math.isfinite(metric):
            raise ValueError("plateau metric must be finite")
        if metric > self.best_metric + 1e-12:
            self.best_metric = metric
            self.wait = 0
        else:
            self.wait += 1
            if self.wait >= self.patience:
                self.lr = max(self.lr * self.factor, self.min_lr)
                self.wait = 0
        return self.lr
