import numpy as np
import pytest

from alloyvae import data as D
from alloyvae.featurize import fit_scaler
from alloyvae.nncore import DenseNet
from alloyvae.dvae.model import DvaeConfig, DvaeModel


@pytest.fixture(scope="session")
def records():
    return D.load_dataset(D.bundled_dataset_path())


def make_random_model(seed: int = 0, latent_dim: int = 2,
                      hidden=(100, 100)) -> DvaeModel:
    """Untrained model with random weights and an identity-ish scaler fit on
    a handful of bundled alloys; enough for contract and gradient tests."""
    rng = np.random.default_rng(seed)
    config = DvaeConfig(seed=seed, latent_dim=latent_dim, hidden=tuple(hidden))
    hidden = list(hidden)
    classifier = DenseNet.create([8, *hidden, 1], "softplus", "linear", rng)
    encoder = DenseNet.create([31, *hidden, 2 * latent_dim], "softplus", "linear", rng)
    decoder = DenseNet.create([1 + latent_dim, *hidden, 30], "softplus", "linear", rng)
    from alloyvae.featurize import features_matrix
    from alloyvae.elements import parse_formula

    sample = [parse_formula(f) for f in
              ("Fe20Ni20Co20Ti20Cu20", "Ti25V25Nb25Zr25", "Al30Cu70",
               "Fe50Ni50", "Al11Ti22V22Nb22Zr22", "Mo40W30Ta30")]
    scaler = fit_scaler(features_matrix(sample))
    return DvaeModel(decoder=decoder, classifier=classifier, encoder=encoder,
                     scaler=scaler, phase_prior_r=0.4, config=config)


@pytest.fixture
def random_model():
    return make_random_model(seed=0)
