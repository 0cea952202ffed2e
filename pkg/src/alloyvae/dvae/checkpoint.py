"""Versioned JSON checkpoints for trained models.

Serialization is canonical (sorted keys, fixed separators, repr-exact
floats), so identical model state always produces byte-identical files and a
save/load round trip is bit-exact.  Loading rejects checkpoints whose
vocabulary hash disagrees with the packaged vocabulary.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from ..elements import vocabulary, vocabulary_hash
from ..featurize import FeatureScaler
from ..nncore import DenseNet
from .model import BaselineClassifier, DvaeConfig, DvaeModel

FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def save_model(model: DvaeModel | BaselineClassifier, path) -> None:
    if isinstance(model, DvaeModel):
        payload = {
            "format_version": FORMAT_VERSION,
            "kind": "dvae",
            "vocabulary": list(vocabulary()),
            "vocabulary_hash": vocabulary_hash(),
            "config": model.config.to_dict(),
            "phase_prior_r": model.phase_prior_r,
            "scaler": {"mean": model.scaler.mean.tolist(), "std": model.scaler.std.tolist()},
            "networks": {name: net.state() for name, net in model.nets().items()},
            "metrics": model.metrics,
            "split_sizes": list(model.split_sizes) if model.split_sizes else None,
            "dataset_sha256": model.dataset_sha256,
            "shap_background": (
                model.shap_background.tolist() if model.shap_background is not None else None
            ),
        }
    else:
        payload = {
            "format_version": FORMAT_VERSION,
            "kind": "classifier",
            "vocabulary": list(vocabulary()),
            "vocabulary_hash": vocabulary_hash(),
            "config": model.config.to_dict(),
            "scaler": {"mean": model.scaler.mean.tolist(), "std": model.scaler.std.tolist()},
            "networks": {"classifier": model.net.state()},
            "metrics": model.metrics,
        }
    atomic_write_text(path, _dumps(payload) + "\n")


def load_model(path) -> DvaeModel | BaselineClassifier:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format {payload.get('format_version')!r}")
    if payload["vocabulary_hash"] != vocabulary_hash():
        raise CheckpointError(
            "checkpoint vocabulary does not match the packaged vocabulary "
            f"({payload['vocabulary_hash'][:12]}... vs {vocabulary_hash()[:12]}...)"
        )
    scaler = FeatureScaler(
        mean=np.array(payload["scaler"]["mean"], dtype=np.float64),
        std=np.array(payload["scaler"]["std"], dtype=np.float64),
    )
    config = DvaeConfig.from_dict(payload["config"])
    nets = {name: DenseNet.from_state(state) for name, state in payload["networks"].items()}
    if payload["kind"] == "classifier":
        return BaselineClassifier(net=nets["classifier"], scaler=scaler, config=config,
                                  metrics=payload.get("metrics", {}))
    bg = payload.get("shap_background")
    sizes = payload.get("split_sizes")
    return DvaeModel(
        decoder=nets["decoder"],
        classifier=nets["classifier"],
        encoder=nets["encoder"],
        scaler=scaler,
        phase_prior_r=payload["phase_prior_r"],
        config=config,
        metrics=payload.get("metrics", {}),
        shap_background=np.array(bg, dtype=np.float64) if bg is not None else None,
        split_sizes=tuple(sizes) if sizes else None,
        dataset_sha256=payload.get("dataset_sha256"),
    )


def checkpoint_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
