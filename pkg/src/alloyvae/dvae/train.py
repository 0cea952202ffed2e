"""Training loops: the full semi-supervised model and the supervised-only
baseline classifier used in the data-efficiency comparison.

Both are single-threaded and deterministic per seed: one RNG drives
initialization, epoch shuffles and reparameterization draws in a fixed
order.  Validation accuracy is evaluated once per epoch; it drives
reduce-on-plateau scheduling and best-model checkpointing, training stops
early once the learning rate decays below 1e-7.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ..data import AlloyRecord, DataSplits, accuracy, roc
from ..elements import to_vector
from ..featurize import features_matrix, fit_scaler
from ..nncore import AdamState, DenseNet, PlateauSchedule, Tensor, adam_step, backward
from ..nncore import tensor as T
from .model import BaselineClassifier, DvaeConfig, DvaeModel
from .objective import (
    NonFiniteLossError,
    combined_batch_loss,
    labelled_batch_loss,
)

LR_STOP = 1e-7
SHAP_BACKGROUND_MAX = 256


class EmptyLabelledSetError(ValueError):
    pass


@dataclass
class TrainingLog:
    columns = ("epoch", "train_loss", "sup_loss", "unsup_loss", "val_accuracy", "lr")
    rows: list[tuple] = field(default_factory=list)

    def append(self, *row) -> None:
        self.rows.append(tuple(row))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()


@dataclass
class TrainResult:
    model: DvaeModel
    log: TrainingLog


def dataset_sha256(records: list[AlloyRecord]) -> str:
    text = "\n".join(f"{r.formula},{r.label}" for r in records)
    return hashlib.sha256(text.encode()).hexdigest()


def _flatten_params(params) -> Tensor:
    """Re-home every parameter array as a view into one contiguous buffer so
    the optimizer can run a single vectorized update per step."""
    flat = np.concatenate([p.data.ravel() for p in params])
    flat_t = Tensor(flat)
    offset = 0
    for p in params:
        n = p.data.size
        p.data = flat_t.data[offset: offset + n].reshape(p.data.shape)
        offset += n
    return flat_t


def _gather_grads(params) -> np.ndarray:
    return np.concatenate([
        (p.grad.ravel() if p.grad is not None else np.zeros(p.data.size))
        for p in params
    ])


def _design_matrices(records):
    x30 = np.stack([to_vector(r.composition) for r in records])
    f8 = features_matrix([r.composition for r in records])
    y = np.array([r.label for r in records], dtype=np.float64)
    return x30, f8, y


def _eval_metrics(probs: np.ndarray, labels: np.ndarray) -> dict:
    out = {"accuracy": accuracy(probs, labels)}
    try:
        out["auc"] = roc(probs, labels).auc
    except ValueError:
        out["auc"] = float("nan")
    return out


def train(config: DvaeConfig, records: list[AlloyRecord], splits: DataSplits) -> TrainResult:
    """Train the semi-supervised model on the given splits and return the
    best-validation-accuracy model (accuracies within one validation sample
    tie and resolve to the lower validation loss)."""
    if len(splits.labelled) == 0:
        raise EmptyLabelledSetError("training requires a nonempty labelled split")
    rng = np.random.default_rng(config.seed)
    x30, f8_raw, y = _design_matrices(records)

    pool = np.concatenate([splits.labelled, splits.unlabelled]).astype(np.intp)
    scaler = fit_scaler(f8_raw[pool])
    f8s = scaler.transform(f8_raw)
    if config.phase_prior_r is None:
        r = float(np.clip(y[splits.labelled].mean(), 1e-6, 1.0 - 1e-6))
    else:
        r = config.phase_prior_r

    l = config.latent_dim
    hidden = list(config.hidden)
    classifier = DenseNet.create([8, *hidden, 1], "softplus", "linear", rng)
    encoder = DenseNet.create([x30.shape[1] + 1, *hidden, 2 * l], "softplus", "linear", rng)
    decoder = DenseNet.create([1 + l, *hidden, x30.shape[1]], "softplus", "linear", rng)
    model = DvaeModel(decoder=decoder, classifier=classifier, encoder=encoder,
                      scaler=scaler, phase_prior_r=r, config=config)

    params = classifier.params() + encoder.params() + decoder.params()
    flat_param = _flatten_params(params)
    adam = AdamState(lr=config.lr0)
    plateau = PlateauSchedule(lr=config.lr0)
    is_labelled = np.zeros(len(records), dtype=bool)
    is_labelled[splits.labelled] = True

    log = TrainingLog()
    best_acc, best_loss, best_state, best_epoch = -1.0, math.inf, None, -1

    def val_probs():
        return model.classify_features(f8_raw[splits.validation])

    def val_loss_deterministic() -> float:
        idx = splits.validation
        total, _ = labelled_batch_loss(model, x30[idx], y[idx], f8s[idx],
                                       np.zeros((len(idx), l)))
        return total.item()

    for epoch in range(1, config.max_epochs + 1):
        perm = rng.permutation(pool)
        epoch_sup = epoch_unsup = 0.0
        for start in range(0, len(perm), config.batch_size):
            batch = perm[start: start + config.batch_size]
            lab = batch[is_labelled[batch]]
            unlab = batch[~is_labelled[batch]]
            eps_l = rng.standard_normal((len(lab), l))
            eps_u = rng.standard_normal((len(unlab), l))
            q1 = model.classify_features(f8_raw[unlab]) if len(unlab) else np.zeros(0)
            total, sup_v, unsup_v = combined_batch_loss(
                model, x30[lab], y[lab], f8s[lab], eps_l,
                x30[unlab], q1, eps_u, config.gamma,
            )
            epoch_sup += sup_v
            epoch_unsup += unsup_v
            if not np.isfinite(total.data):
                raise NonFiniteLossError(
                    f"non-finite loss at epoch {epoch}, batch offset {start}"
                )
            for p in params:
                p.grad = None
            backward(total)
            adam.lr = plateau.lr
            adam_step(adam, [flat_param], [_gather_grads(params)])

        epoch_total = epoch_sup + epoch_unsup
        val_acc = accuracy(val_probs(), y[splits.validation])
        log.append(epoch, epoch_total, epoch_sup, epoch_unsup, val_acc, plateau.lr)
        # highest validation accuracy wins; accuracies within one validation
        # sample of the best count as ties and resolve to the lower
        # validation loss, so the saved model keeps training-mature
        # reconstruction instead of freezing at an early noise spike
        tie_band = 1.0 / max(len(splits.validation), 1) + 1e-12
        if val_acc > best_acc:
            best_acc, best_loss, best_epoch = val_acc, val_loss_deterministic(), epoch
            best_state = _snapshot(model)
        elif val_acc >= best_acc - tie_band:
            vl = val_loss_deterministic()
            if vl < best_loss:
                best_loss, best_epoch = vl, epoch
                best_state = _snapshot(model)
        new_lr = plateau.update(val_acc)
        if new_lr < LR_STOP:
            break

    if best_state is not None:
        _restore(model, best_state)

    bg_rng = np.random.default_rng((config.seed, 2718))
    bg_idx = splits.labelled
    if len(bg_idx) > SHAP_BACKGROUND_MAX:
        bg_idx = bg_idx[bg_rng.choice(len(bg_idx), SHAP_BACKGROUND_MAX, replace=False)]
    model.shap_background = f8s[np.sort(bg_idx)]
    model.split_sizes = splits.sizes()
    model.dataset_sha256 = dataset_sha256(records)
    model.metrics = {
        "best_epoch": best_epoch,
        "epochs_run": len(log.rows),
        "train": _eval_metrics(model.classify_features(f8_raw[splits.labelled]),
                               y[splits.labelled]),
        "validation": _eval_metrics(model.classify_features(f8_raw[splits.validation]),
                                    y[splits.validation]),
        "test": _eval_metrics(model.classify_features(f8_raw[splits.test]), y[splits.test]),
        "seed": config.seed,
    }
    return TrainResult(model=model, log=log)


def _snapshot(model: DvaeModel):
    return {name: net.snapshot() for name, net in model.nets().items()}


def _restore(model: DvaeModel, state) -> None:
    for name, net in model.nets().items():
        net.restore(state[name])


def train_supervised_baseline(config: DvaeConfig, records: list[AlloyRecord],
                              labelled: np.ndarray, validation: np.ndarray,
                              ) -> BaselineClassifier:
    """Classifier-head-only training on labelled data with the same optimizer
    settings; unlabelled data is never touched."""
    if len(labelled) == 0:
        raise EmptyLabelledSetError("baseline requires a nonempty labelled split")
    rng = np.random.default_rng(config.seed)
    _, f8_raw, y = _design_matrices(records)
    scaler = fit_scaler(f8_raw[labelled])
    f8s = scaler.transform(f8_raw)

    net = DenseNet.create([8, *list(config.hidden), 1], "softplus", "linear", rng)
    clf = BaselineClassifier(net=net, scaler=scaler, config=config)
    params = net.params()
    flat_param = _flatten_params(params)
    adam = AdamState(lr=config.lr0)
    plateau = PlateauSchedule(lr=config.lr0)
    best_acc, best_loss, best_state = -1.0, math.inf, None

    def val_stats():
        probs = clf.classify_features(f8_raw[validation])
        acc = accuracy(probs, y[validation])
        eps = 1e-12
        ce = -float(np.sum(y[validation] * np.log(probs + eps)
                           + (1 - y[validation]) * np.log(1 - probs + eps)))
        return acc, ce

    for _epoch in range(1, config.max_epochs + 1):
        perm = rng.permutation(labelled)
        for start in range(0, len(perm), config.batch_size):
            batch = perm[start: start + config.batch_size]
            logits = net.forward(Tensor(f8s[batch]))
            phi = Tensor(y[batch][:, None])
            loss = T.sum_all(T.sub(T.softplus(logits), T.mul(phi, logits)))
            if not np.isfinite(loss.data):
                raise NonFiniteLossError("non-finite baseline loss")
            for p in params:
                p.grad = None
            backward(loss)
            adam.lr = plateau.lr
            adam_step(adam, [flat_param], [_gather_grads(params)])
        val_acc, val_ce = val_stats()
        if val_acc > best_acc or (val_acc == best_acc and val_ce < best_loss):
            best_acc, best_loss = val_acc, val_ce
            best_state = net.snapshot()
        if plateau.update(val_acc) < LR_STOP:
            break

    if best_state is not None:
        net.restore(best_state)
    clf.metrics = {
        "validation": _eval_metrics(clf.classify_features(f8_raw[validation]), y[validation]),
        "seed": config.seed,
    }
    return clf
