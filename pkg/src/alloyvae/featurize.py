"""The fixed physics-informed transformation from composition to the eight
engineered descriptors, plus train-set standardization for the classifier.

Descriptor definitions are the standard high-entropy-alloy ones: bulk modulus,
molar volume, melting temperature and valence electron concentration as
composition-weighted means; atomic size and electronegativity differences as
root-mean-square deviations; ideal mixing entropy; regular-solution mixing
enthalpy ``sum 4 Omega_ij c_i c_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elements import (
    GAS_CONSTANT,
    Composition,
    MissingElementPropertyError,
    element_table,
    pair_table,
)

FEATURE_NAMES = (
    "bulk_modulus",
    "molar_volume",
    "melting_t",
    "vec",
    "delta",
    "delta_chi",
    "ds_mix",
    "dh_mix",
)


class EmptyFeatureListError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector8:
    bulk_modulus: float  # GPa
    molar_volume: float  # cm^3/mol
    melting_t: float  # K
    vec: float
    delta: float  # atomic size difference, fraction (not percent)
    delta_chi: float
    ds_mix: float  # J/(mol K)
    dh_mix: float  # kJ/mol

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in FEATURE_NAMES], dtype=np.float64)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "FeatureVector8":
        return cls(**{n: float(v) for n, v in zip(FEATURE_NAMES, a)})


def engineered_features(c: Composition) -> FeatureVector8:
    elems = element_table()
    pairs = pair_table()
    syms = sorted(c.support())
    for s in syms:
        if s not in elems:
            raise MissingElementPropertyError(f"no property row for element {s}")
    cs = np.array([c[s] for s in syms])
    k = sum(ci * elems[s].bulk_modulus for s, ci in zip(syms, cs))
    v_m = sum(ci * elems[s].molar_volume for s, ci in zip(syms, cs))
    t_m = sum(ci * elems[s].melting_t for s, ci in zip(syms, cs))
    vec = sum(ci * elems[s].vec for s, ci in zip(syms, cs))
    r_mean = sum(ci * elems[s].atomic_radius for s, ci in zip(syms, cs))
    delta = math.sqrt(
        sum(ci * (1.0 - elems[s].atomic_radius / r_mean) ** 2 for s, ci in zip(syms, cs))
    )
    chi_mean = sum(ci * elems[s].electronegativity for s, ci in zip(syms, cs))
    delta_chi = math.sqrt(
        sum(ci * (elems[s].electronegativity - chi_mean) ** 2 for s, ci in zip(syms, cs))
    )
    ds_mix = -GAS_CONSTANT * sum(ci * math.log(ci) for ci in cs if ci > 0.0)
    dh_mix = 0.0
    for i in range(len(syms)):
        for j in range(i + 1, len(syms)):
            dh_mix += 4.0 * pairs.omega(syms[i], syms[j]) * cs[i] * cs[j]
    return FeatureVector8(float(k), float(v_m), float(t_m), float(vec),
                          float(delta), float(delta_chi), float(ds_mix), float(dh_mix))


def features_matrix(compositions) -> np.ndarray:
    return np.array([engineered_features(c).as_array() for c in compositions])


@dataclass(frozen=True)
class FeatureScaler:
    mean: np.ndarray
    std: np.ndarray  # strictly positive in every component

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.std

    def inverse(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=np.float64) * self.std + self.mean


def fit_scaler(features: np.ndarray) -> FeatureScaler:
    """Per-feature standardization statistics; zero-variance columns get
    std clamped to 1 so constant features standardize to 0."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyFeatureListError("need a nonempty 2-D feature matrix")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std <= 0.0, 1.0, std)
    return FeatureScaler(mean=mean, std=std)


def apply_scaler(s: FeatureScaler, f: FeatureVector8) -> np.ndarray:
    return s.transform(f.as_array())
