"""Minimal reverse-mode differentiation and training machinery."""

from . import tensor
from .layers import ACTIVATIONS, DenseLayer, DenseNet
from .optim import AdamState, PlateauSchedule, adam_step
from .tensor import (
    NonFiniteValueError,
    ShapeMismatchError,
    Tensor,
    backward,
    log_softmax_np,
    sigmoid_np,
    softmax_np,
    softplus_np,
)

__all__ = [
    "ACTIVATIONS",
    "AdamState",
    "DenseLayer",
    "DenseNet",
    "NonFiniteValueError",
    "PlateauSchedule",
    "ShapeMismatchError",
    "Tensor",
    "adam_step",
    "backward",
    "log_softmax_np",
    "sigmoid_np",
    "softmax_np",
    "softplus_np",
    "tensor",
]
