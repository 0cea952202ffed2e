"""Variational objective terms built on the autodiff tape.

Labelled points contribute reconstruction + latent KL - log p(phi) plus the
classifier cross-entropy; the whole labelled sum is weighted by gamma in the
total.  Unlabelled points marginalize phi over {0, 1} with classifier
probabilities treated as constants, so no gradient reaches the classifier
from unlabelled data.

Compositions are multinomial observations at percent resolution: the
reconstruction log-likelihood is -sum(100 x_i log p_i), i.e. counts on the
standard integer-percent formula scale (the composition-independent
multinomial coefficient is dropped).  Keeping the count scale matters: with
plain fractional cross-entropy the KL term dominates and the posterior
collapses, leaving reconstructions at family-mean quality.
"""

from __future__ import annotations

import math

import numpy as np

from ..nncore import Tensor, backward
from ..nncore import tensor as T
from .model import DvaeModel


MULTINOMIAL_COUNT_SCALE = 100.0  # percent-resolution composition counts


class NonFiniteLossError(FloatingPointError):
    pass


def _gaussian_kl_terms(mu: Tensor, logvar: Tensor) -> Tensor:
    """Elementwise 0.5 (mu^2 + sigma^2 - 1 - log sigma^2) against N(0, I)."""
    s = T.sub(T.add_scalar(T.add(T.mul(mu, mu), T.exp(logvar)), -1.0), logvar)
    return s  # (batch, l); caller weights/sums and applies the 0.5


def _vae_terms(model: DvaeModel, x30: np.ndarray, phi_in: np.ndarray,
               eps: np.ndarray) -> tuple[Tensor, Tensor]:
    """One reparameterized pass; returns (per-element recon matrix term,
    per-element KL matrix term) as tape tensors.

    phi_in conditions both encoder and decoder and carries no gradient.
    """
    l = model.config.latent_dim
    enc_in = Tensor(np.concatenate([x30, phi_in[:, None]], axis=1))
    h = model.encoder.forward(enc_in)
    mu, logvar = T.slice_cols(h, 0, l), T.slice_cols(h, l, 2 * l)
    std = T.exp(T.scale(logvar, 0.5))
    z = T.add(mu, T.mul(std, Tensor(eps)))
    dec_in = T.concat_cols(Tensor(phi_in[:, None]), z)
    logp = T.log_softmax(model.decoder.forward(dec_in))
    return logp, _gaussian_kl_terms(mu, logvar)


def labelled_batch_loss(model: DvaeModel, x30: np.ndarray, phi: np.ndarray,
                        f8s: np.ndarray, eps: np.ndarray) -> tuple[Tensor, dict]:
    """Summed labelled loss over a batch (gamma NOT applied here):
    -(E log p(x|phi,z) - KL - (-log p(phi))) + cross-entropy(psi_phi, phi)."""
    logp, kl_terms = _vae_terms(model, x30, phi, eps)
    recon = T.neg(T.sum_all(T.mul(Tensor(MULTINOMIAL_COUNT_SCALE * x30), logp)))
    kl = T.scale(T.sum_all(kl_terms), 0.5)
    r = model.phase_prior_r
    log_p_phi = float(np.sum(phi * math.log(r) + (1.0 - phi) * math.log(1.0 - r)))
    logits = model.classifier.forward(Tensor(f8s))
    ce = T.sum_all(T.sub(T.softplus(logits), T.mul(Tensor(phi[:, None]), logits)))
    total = T.add_scalar(T.add(T.add(recon, kl), ce), -log_p_phi)
    parts = {"recon": recon.item(), "kl": kl.item(), "log_p_phi": log_p_phi,
             "ce": ce.item()}
    return total, parts


def unlabelled_batch_loss(model: DvaeModel, x30: np.ndarray, q1: np.ndarray,
                          eps: np.ndarray) -> tuple[Tensor, dict]:
    """Summed unlabelled loss: enumeration over phi in {0, 1}, branch terms
    weighted by the classifier probabilities ``q1`` (treated as constants)."""
    branch_totals = []
    parts = {}
    for b, w in ((0.0, 1.0 - q1), (1.0, q1)):
        phi_in = np.full(x30.shape[0], b)
        logp, kl_terms = _vae_terms(model, x30, phi_in, eps)
        wx = MULTINOMIAL_COUNT_SCALE * w[:, None] * x30
        recon = T.neg(T.sum_all(T.mul(Tensor(wx), logp)))
        wl = np.broadcast_to(w[:, None], kl_terms.shape).copy()
        kl = T.scale(T.sum_all(T.mul(Tensor(wl), kl_terms)), 0.5)
        branch_totals.append(T.add(recon, kl))
        parts[f"recon_phi{int(b)}"] = recon.item()
        parts[f"kl_phi{int(b)}"] = kl.item()
    total = T.add(branch_totals[0], branch_totals[1])
    return total, parts


def combined_batch_loss(model: DvaeModel, x30_lab: np.ndarray, phi_lab: np.ndarray,
                        f8s_lab: np.ndarray, eps_lab: np.ndarray,
                        x30_unlab: np.ndarray, q1_unlab: np.ndarray,
                        eps_unlab: np.ndarray, gamma: float,
                        ) -> tuple[Tensor, float, float]:
    """gamma * (labelled sum) + (unlabelled sum) in one stacked tape pass.

    Labelled rows and both unlabelled enumeration branches share a single
    encoder/decoder evaluation; per-row weights (gamma, 1-q1, q1) are folded
    into the constant factors, so the scalar equals the composition of
    :func:`labelled_batch_loss` and :func:`unlabelled_batch_loss` up to
    float summation order.  Returns (loss, sup_value, unsup_value).
    """
    n_lab, n_unlab = x30_lab.shape[0], x30_unlab.shape[0]
    x_stack = np.concatenate([x30_lab, x30_unlab, x30_unlab], axis=0)
    phi_stack = np.concatenate([phi_lab, np.zeros(n_unlab), np.ones(n_unlab)])
    eps_stack = np.concatenate([eps_lab, eps_unlab, eps_unlab], axis=0)
    row_w = np.concatenate([np.full(n_lab, gamma), 1.0 - q1_unlab, q1_unlab])

    logp, kl_terms = _vae_terms(model, x_stack, phi_stack, eps_stack)
    recon = T.neg(T.sum_all(T.mul(Tensor(MULTINOMIAL_COUNT_SCALE * row_w[:, None] * x_stack),
                                  logp)))
    wl = np.broadcast_to(row_w[:, None], kl_terms.shape).copy()
    kl = T.scale(T.sum_all(T.mul(Tensor(wl), kl_terms)), 0.5)
    total = T.add(recon, kl)

    r = model.phase_prior_r
    log_p_phi = float(np.sum(phi_lab * math.log(r) + (1.0 - phi_lab) * math.log(1.0 - r)))
    if n_lab:
        logits = model.classifier.forward(Tensor(f8s_lab))
        ce = T.sum_all(T.sub(T.softplus(logits), T.mul(Tensor(phi_lab[:, None]), logits)))
        total = T.add_scalar(T.add(total, T.scale(ce, gamma)), -gamma * log_p_phi)

    # component values for logging, recovered from the forward data only
    per_row = (-(MULTINOMIAL_COUNT_SCALE * x_stack * logp.data).sum(axis=1)
               + 0.5 * kl_terms.data.sum(axis=1))
    sup_value = float(gamma * (per_row[:n_lab].sum() - log_p_phi))
    if n_lab:
        sup_value += gamma * ce.item()
    unsup_value = float((row_w[n_lab:] * per_row[n_lab:]).sum())
    return total, sup_value, unsup_value


def _single_grads(model: DvaeModel, total: Tensor) -> dict[str, list[np.ndarray]]:
    for net in model.nets().values():
        net.zero_grad()
    backward(total)
    return {name: net.gradients() for name, net in model.nets().items()}


def elbo_labelled(model: DvaeModel, composition, phi: float,
                  eps: np.ndarray | None = None) -> tuple[float, dict, dict]:
    """Loss, components and parameter gradients for one labelled example.

    eps is the frozen reparameterization draw (zeros if omitted).
    """
    from ..elements import to_vector
    from ..featurize import engineered_features

    l = model.config.latent_dim
    if eps is None:
        eps = np.zeros((1, l))
    x30 = to_vector(composition)[None, :]
    f8s = model.scaler.transform(engineered_features(composition).as_array())[None, :]
    total, parts = labelled_batch_loss(model, x30, np.array([float(phi)]), f8s,
                                       eps.reshape(1, l))
    if not np.isfinite(total.data):
        raise NonFiniteLossError("labelled loss is not finite")
    return total.item(), parts, _single_grads(model, total)


def elbo_unlabelled(model: DvaeModel, composition,
                    eps: np.ndarray | None = None) -> tuple[float, dict, dict]:
    """Loss, components and parameter gradients for one unlabelled example."""
    from ..elements import to_vector

    l = model.config.latent_dim
    if eps is None:
        eps = np.zeros((1, l))
    x30 = to_vector(composition)[None, :]
    q1 = np.array([model.classify(composition)])
    total, parts = unlabelled_batch_loss(model, x30, q1, eps.reshape(1, l))
    if not np.isfinite(total.data):
        raise NonFiniteLossError("unlabelled loss is not finite")
    return total.item(), parts, _single_grads(model, total)
