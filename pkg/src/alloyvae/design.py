"""Inverse-design workflows over a trained model: classifier screening,
generation from a latent point plus target probability (with a consistency
re-check), the iterative inversion loop, the latent-grid interpolation study,
latent-map export and element-group probes."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.stats import gaussian_kde

from .data import AlloyRecord
from .elements import Composition, format_standard, to_vector, vocabulary
from .featurize import features_matrix
from .dvae.model import DvaeModel

DEFAULT_GROUPS = {
    "noble": ["Ru", "Rh", "Pd", "Ag", "Ir", "Pt", "Au"],
    "refractory": ["Ti", "V", "Zr", "Nb", "Mo", "Hf", "Ta", "W"],
    "magnetic": ["Fe", "Co", "Ni", "Mn"],
}

DENSITY_GRID_SIZE = 80
LOW_DENSITY_PERCENTILE = 10.0


class EmptyInputError(ValueError):
    pass


class GroupTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class DesignStep:
    alloy: Composition
    probability: float
    latent: np.ndarray


@dataclass(frozen=True)
class DesignTrace:
    steps: list[DesignStep]
    converged: bool
    cutoff: float

    def formulas(self) -> list[str]:
        return [format_standard(s.alloy) for s in self.steps]


def screen(model: DvaeModel, candidates: list[Composition], cutoff: float,
           ) -> list[tuple[Composition, float]]:
    """Candidates with single-phase probability >= cutoff, sorted descending;
    ties keep candidate order."""
    if not candidates:
        return []
    probs = model.classify_features(features_matrix(candidates))
    keep = [(c, float(p)) for c, p in zip(candidates, probs) if p >= cutoff]
    return sorted(keep, key=lambda cp: -cp[1])


@dataclass(frozen=True)
class GenerateResult:
    composition: Composition
    recheck_p: float
    consistent: bool


def generate(model: DvaeModel, z: np.ndarray, target_p: float) -> GenerateResult:
    """Decode an alloy at (z, target_p) and re-examine it with the classifier;
    consistent means both probabilities fall on the same side of 0.5."""
    if not 0.0 <= target_p <= 1.0:
        raise ValueError(f"target_p must lie in [0, 1], got {target_p}")
    alloy = model.decode_composition(np.asarray(z, dtype=np.float64), target_p)
    recheck = model.classify(alloy)
    consistent = (recheck >= 0.5) == (target_p >= 0.5)
    return GenerateResult(composition=alloy, recheck_p=recheck, consistent=consistent)


def invert(model: DvaeModel, start: Composition, cutoff: float = 0.6,
           max_iters: int = 10) -> DesignTrace:
    """Iterative inversion: classify, stop once probability exceeds the
    cutoff, otherwise encode with the predicted probability and decode at the
    inverted probability 1 - p; posterior means only, fully deterministic."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    steps = []
    alloy = start
    for _ in range(max_iters + 1):
        p = model.classify(alloy)
        mu, _sigma = model.encode(alloy, p)
        steps.append(DesignStep(alloy=alloy, probability=p, latent=mu))
        if p > cutoff or len(steps) == max_iters + 1:
            break
        alloy = model.decode_composition(mu, 1.0 - p)
    converged = steps[-1].probability > cutoff
    return DesignTrace(steps=steps, converged=converged, cutoff=cutoff)


@dataclass(frozen=True)
class GridRow:
    z1: float
    z2: float
    target_p: float
    composition: Composition
    recheck_p: float
    consistent: bool


def grid_study(model: DvaeModel, z1_values, z2_values, targets) -> list[GridRow]:
    """Cartesian generate() evaluation over a latent grid and target set."""
    rows = []
    for z1 in z1_values:
        for z2 in z2_values:
            for t in targets:
                res = generate(model, np.array([z1, z2]), float(t))
                rows.append(GridRow(float(z1), float(z2), float(t),
                                    res.composition, res.recheck_p, res.consistent))
    return rows


@dataclass
class LatentMap:
    points: list[dict]
    z1_grid: np.ndarray
    z2_grid: np.ndarray
    density: np.ndarray  # (len(z2_grid), len(z1_grid)), integrates to ~1
    low_density_threshold: float
    groups: dict[str, list[list[float]]] = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "points": self.points,
            "density": {
                "z1": self.z1_grid.tolist(),
                "z2": self.z2_grid.tolist(),
                "values": self.density.tolist(),
                "low_density_threshold": self.low_density_threshold,
            },
            "groups": self.groups,
        }


def latent_map(model: DvaeModel, records: list[AlloyRecord],
               grid_size: int = DENSITY_GRID_SIZE,
               groups: dict[str, list[str]] | None = None) -> LatentMap:
    """Posterior means for every record (conditioned on its predicted
    probability), a Scott-bandwidth Gaussian KDE density grid over the cloud,
    and optional element-group probe clouds for overlays."""
    if not records:
        raise EmptyInputError("latent_map needs at least one record")
    x30 = np.stack([to_vector(r.composition) for r in records])
    probs = model.classify_features(features_matrix([r.composition for r in records]))
    mu, _sigma = model.encode_batch(x30, probs)

    points = [
        {
            "z": [float(mu[i, 0]), float(mu[i, 1])],
            "probability": float(probs[i]),
            "label": int(r.label),
            "n_elements": r.composition.n_elements(),
            "formula": r.formula,
        }
        for i, r in enumerate(records)
    ]

    if len(records) > 1:
        kde = gaussian_kde(mu.T, bw_method="scott")
        kernel_sd = np.sqrt(np.diag(kde.covariance))
    else:
        kde = None
        kernel_sd = np.array([0.5, 0.5])
    pad = 4.0 * kernel_sd
    z1_grid = np.linspace(mu[:, 0].min() - pad[0], mu[:, 0].max() + pad[0], grid_size)
    z2_grid = np.linspace(mu[:, 1].min() - pad[1], mu[:, 1].max() + pad[1], grid_size)
    zz1, zz2 = np.meshgrid(z1_grid, z2_grid)
    if kde is not None:
        density = kde(np.vstack([zz1.ravel(), zz2.ravel()])).reshape(zz1.shape)
        point_density = kde(mu.T)
    else:
        # degenerate single-point cloud: isotropic Gaussian bump
        d2 = ((zz1 - mu[0, 0]) ** 2 + (zz2 - mu[0, 1]) ** 2) / (2 * kernel_sd[0] ** 2)
        density = np.exp(-d2) / (2 * np.pi * kernel_sd[0] ** 2)
        point_density = np.array([density.max()])
    threshold = float(np.percentile(point_density, LOW_DENSITY_PERCENTILE))

    lm = LatentMap(points=points, z1_grid=z1_grid, z2_grid=z2_grid, density=density,
                   low_density_threshold=threshold)
    if groups:
        clouds = group_probe(model, groups)
        lm.groups = {name: c.tolist() for name, c in clouds.items()}
    return lm


def group_probe(model: DvaeModel, element_groups: dict[str, list[str]],
                ) -> dict[str, np.ndarray]:
    """Latent posterior means of every equimolar four-element alloy drawn
    from each group; groups must have at least four vocabulary elements."""
    vocab = set(vocabulary())
    clouds = {}
    for name, symbols in element_groups.items():
        usable = [s for s in symbols if s in vocab]
        if len(usable) < 4:
            raise GroupTooSmallError(
                f"group {name!r} has {len(usable)} vocabulary elements, needs >= 4"
            )
        alloys = [Composition({s: 0.25 for s in quad})
                  for quad in combinations(usable, 4)]
        probs = model.classify_features(features_matrix(alloys))
        x30 = np.stack([to_vector(a) for a in alloys])
        mu, _sigma = model.encode_batch(x30, probs)
        clouds[name] = mu
    return clouds
