"""Model-agnostic kernel SHAP for the classifier head.

With eight features every coalition is enumerated exactly (2^8 = 256), masked
features are integrated out over a background sample, and the Shapley-kernel
weighted least squares is solved with the empty/full coalitions enforced as
equality constraints.  That makes local accuracy (base value plus
attributions equals the model output) an exact property, not an estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .data import AlloyRecord
from .featurize import FEATURE_NAMES, FeatureVector8, features_matrix
from .dvae.model import DvaeModel

MAX_EXACT_FEATURES = 12


class EmptyBackgroundError(ValueError):
    pass


class NonFiniteModelOutputError(FloatingPointError):
    pass


@dataclass(frozen=True)
class ShapExplanation:
    base_value: float
    shap_values: np.ndarray
    instance: FeatureVector8
    model_output: float

    def local_accuracy_gap(self) -> float:
        return abs(self.base_value + float(self.shap_values.sum()) - self.model_output)


def coalition_values(model_fn, instance: np.ndarray, background: np.ndarray,
                     ) -> tuple[np.ndarray, np.ndarray]:
    """All 2^M coalition masks and their interventional values
    v(S) = mean over background of model(instance on S, background off S)."""
    m = instance.shape[0]
    n_coal = 1 << m
    masks = ((np.arange(n_coal)[:, None] >> np.arange(m)[None, :]) & 1).astype(bool)
    n_bg = background.shape[0]
    hybrid = np.where(
        np.repeat(masks, n_bg, axis=0),
        instance[None, :],
        np.tile(background, (n_coal, 1)),
    )
    out = np.asarray(model_fn(hybrid), dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise NonFiniteModelOutputError("model produced non-finite outputs")
    values = out.reshape(n_coal, n_bg).mean(axis=1)
    return masks, values


def kernel_shap(model_fn, instance: np.ndarray, background: np.ndarray,
                ) -> tuple[float, np.ndarray]:
    """Exact kernel SHAP attributions; returns (base_value, shap_values).

    model_fn maps an (n, M) matrix to n outputs; background rows define the
    interventional expectation.
    """
    instance = np.asarray(instance, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    if background.shape[0] == 0:
        raise EmptyBackgroundError("kernel_shap needs a nonempty background")
    m = instance.shape[0]
    if m > MAX_EXACT_FEATURES:
        raise ValueError(f"exact enumeration limited to {MAX_EXACT_FEATURES} features")

    masks, values = coalition_values(model_fn, instance, background)
    sizes = masks.sum(axis=1)
    base = float(values[0])
    full = float(values[-1])
    delta = full - base

    partial = (sizes > 0) & (sizes < m)
    z = masks[partial].astype(np.float64)
    y = values[partial] - base
    s = sizes[partial]
    w = (m - 1) / (np.array([comb(m, int(k)) for k in s]) * s * (m - s))

    # eliminate the last coefficient through the equality constraint
    # sum(shap) = full - base, then solve the weighted least squares
    y_adj = y - z[:, -1] * delta
    x_adj = z[:, :-1] - z[:, -1:]
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(x_adj * sw[:, None], y_adj * sw, rcond=None)
    shap = np.concatenate([coef, [delta - coef.sum()]])
    return base, shap


@dataclass
class GlobalImportance:
    feature_names: tuple[str, ...]
    instances_raw: np.ndarray  # (n, 8) unstandardized feature values
    shap_values: np.ndarray  # (n, 8), probability units
    base_values: np.ndarray  # (n,)
    model_outputs: np.ndarray  # (n,)
    mean_abs: np.ndarray  # (8,)

    def to_jsonable(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "instances_raw": self.instances_raw.tolist(),
            "shap_values": self.shap_values.tolist(),
            "base_values": self.base_values.tolist(),
            "model_outputs": self.model_outputs.tolist(),
            "mean_abs": self.mean_abs.tolist(),
        }


def explain_alloy(model: DvaeModel, composition, background_std: np.ndarray,
                  ) -> ShapExplanation:
    """Kernel SHAP attributions for one alloy against a standardized-feature
    background (probability units)."""
    from .featurize import engineered_features

    fv = engineered_features(composition)
    instance_std = model.scaler.transform(fv.as_array())

    def model_fn(x_std):
        from .nncore import sigmoid_np

        return sigmoid_np(model.classifier.forward_np(x_std)[:, 0])

    base, shap = kernel_shap(model_fn, instance_std, background_std)
    output = float(model_fn(instance_std[None, :])[0])
    return ShapExplanation(base_value=base, shap_values=shap, instance=fv,
                           model_output=output)


def global_importance(model: DvaeModel, evaluation: list[AlloyRecord],
                      background: list[AlloyRecord] | np.ndarray,
                      max_background: int = 256, seed: int = 0) -> GlobalImportance:
    """Explain the classifier over an evaluation set; the background is the
    (optionally subsampled) training pool in standardized feature space."""
    if isinstance(background, np.ndarray):
        background_std = background
    else:
        if not background:
            raise EmptyBackgroundError("empty background records")
        background_std = model.scaler.transform(
            features_matrix([r.composition for r in background])
        )
    if background_std.shape[0] > max_background:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(background_std.shape[0], max_background, replace=False))
        background_std = background_std[idx]
    if not evaluation:
        raise ValueError("empty evaluation set")

    raws, shaps, bases, outs = [], [], [], []
    for rec in evaluation:
        exp = explain_alloy(model, rec.composition, background_std)
        raws.append(exp.instance.as_array())
        shaps.append(exp.shap_values)
        bases.append(exp.base_value)
        outs.append(exp.model_output)
    shap_arr = np.stack(shaps)
    return GlobalImportance(
        feature_names=FEATURE_NAMES,
        instances_raw=np.stack(raws),
        shap_values=shap_arr,
        base_values=np.array(bases),
        model_outputs=np.array(outs),
        mean_abs=np.abs(shap_arr).mean(axis=0),
    )
