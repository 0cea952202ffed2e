"""Disentangled semi-supervised VAE: model, objective, training, checkpoints."""

from .checkpoint import (
    CheckpointError,
    atomic_write_text,
    checkpoint_sha256,
    load_model,
    save_model,
)
from .model import BaselineClassifier, DvaeConfig, DvaeModel
from .objective import (
    NonFiniteLossError,
    elbo_labelled,
    elbo_unlabelled,
    labelled_batch_loss,
    unlabelled_batch_loss,
)
from .train import (
    EmptyLabelledSetError,
    TrainingLog,
    TrainResult,
    dataset_sha256,
    train,
    train_supervised_baseline,
)

__all__ = [
    "BaselineClassifier",
    "CheckpointError",
    "DvaeConfig",
    "DvaeModel",
    "EmptyLabelledSetError",
    "NonFiniteLossError",
    "TrainResult",
    "TrainingLog",
    "atomic_write_text",
    "checkpoint_sha256",
    "dataset_sha256",
    "elbo_labelled",
    "elbo_unlabelled",
    "labelled_batch_loss",
    "load_model",
    "save_model",
    "train",
    "train_supervised_baseline",
    "unlabelled_batch_loss",
]
