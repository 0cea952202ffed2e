"""The disentangled semi-supervised VAE: configuration, trained-model
container and the deterministic inference operations (classify / encode /
decode / reconstruct)."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from ..elements import Composition, from_vector, to_vector
from ..featurize import FeatureScaler, apply_scaler, engineered_features
from ..nncore import DenseNet, sigmoid_np, softmax_np

PROB_CLIP = 1e-12  # keeps classifier output in the open interval (0, 1)


@dataclass(frozen=True)
class DvaeConfig:
    latent_dim: int = 2
    hidden: tuple[int, ...] = (100, 100)
    gamma: float = 10.0  # supervision weight on the labelled objective
    phase_prior_r: float | None = None  # None -> empirical SP rate of the labelled split
    batch_size: int = 32
    max_epochs: int = 20000
    lr0: float = 1e-4
    seed: int = 0
    sp_cutoff: float = 0.6

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.phase_prior_r is not None and not 0.0 < self.phase_prior_r < 1.0:
            raise ValueError("phase_prior_r must lie in (0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.lr0 <= 0:
            raise ValueError("lr0 must be positive")
        object.__setattr__(self, "hidden", tuple(self.hidden))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DvaeConfig":
        d = dict(d)
        d["hidden"] = tuple(d["hidden"])
        return cls(**d)


def _classify_np(net: DenseNet, scaler: FeatureScaler, f8: np.ndarray) -> np.ndarray:
    logits = net.forward_np(scaler.transform(np.atleast_2d(f8)))
    return np.clip(sigmoid_np(logits[:, 0]), PROB_CLIP, 1.0 - PROB_CLIP)


@dataclass
class DvaeModel:
    decoder: DenseNet  # (1 + l) -> 30 composition logits
    classifier: DenseNet  # 8 standardized features -> 1 logit
    encoder: DenseNet  # (30 + 1) -> (mu, log sigma^2), each l wide
    scaler: FeatureScaler
    phase_prior_r: float
    config: DvaeConfig
    metrics: dict = field(default_factory=dict)
    shap_background: np.ndarray | None = None  # standardized train features
    split_sizes: tuple[int, int, int, int] | None = None
    dataset_sha256: str | None = None

    # -- classification ----------------------------------------------------
    def classify(self, c: Composition) -> float:
        """Single-phase probability from the classifier head."""
        return float(self.classify_features(engineered_features(c).as_array())[0])

    def classify_features(self, f8_raw: np.ndarray) -> np.ndarray:
        return _classify_np(self.classifier, self.scaler, f8_raw)

    def features_std(self, c: Composition) -> np.ndarray:
        return apply_scaler(self.scaler, engineered_features(c))

    # -- recognition -------------------------------------------------------
    def encode(self, c: Composition, phi: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Gaussian posterior parameters (mu, sigma) for one composition;
        phi defaults to the classifier output."""
        if phi is None:
            phi = self.classify(c)
        if not 0.0 <= phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {phi}")
        mu, sigma = self.encode_batch(to_vector(c)[None, :], np.array([phi]))
        return mu[0], sigma[0]

    def encode_batch(self, x30: np.ndarray, phis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        inp = np.concatenate([x30, phis[:, None]], axis=1)
        out = self.encoder.forward_np(inp)
        l = self.config.latent_dim
        mu, logvar = out[:, :l], out[:, l:]
        return mu, np.exp(0.5 * logvar)

    # -- generation --------------------------------------------------------
    def decode(self, z: np.ndarray, phi: float) -> np.ndarray:
        """Composition probability vector (length 30) for one latent point."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.config.latent_dim,):
            raise ValueError(f"z must have shape ({self.config.latent_dim},), got {z.shape}")
        if not np.all(np.isfinite(z)):
            raise ValueError("z must be finite")
        if not 0.0 <= phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {phi}")
        inp = np.concatenate([[phi], z])[None, :]
        return softmax_np(self.decoder.forward_np(inp))[0]

    def decode_composition(self, z: np.ndarray, phi: float) -> Composition:
        return from_vector(self.decode(z, phi))

    def reconstruct(self, c: Composition) -> tuple[Composition, float, np.ndarray]:
        """Posterior-mean reconstruction driven by the predicted probability."""
        p_hat = self.classify(c)
        mu, _sigma = self.encode(c, p_hat)
        return self.decode_composition(mu, p_hat), p_hat, mu

    def nets(self) -> dict[str, DenseNet]:
        return {"classifier": self.classifier, "encoder": self.encoder, "decoder": self.decoder}


@dataclass
class BaselineClassifier:
    """Supervised-only classifier with the same head architecture, used for
    the data-efficiency comparison."""

    net: DenseNet
    scaler: FeatureScaler
    config: DvaeConfig
    metrics: dict = field(default_factory=dict)

    def classify(self, c: Composition) -> float:
        return float(self.classify_features(engineered_features(c).as_array())[0])

    def classify_features(self, f8_raw: np.ndarray) -> np.ndarray:
        return _classify_np(self.net, self.scaler, f8_raw)
