"""Semi-supervised disentangled VAE for single-phase high-entropy alloy
classification and inverse design."""

__version__ = "0.1.0"
