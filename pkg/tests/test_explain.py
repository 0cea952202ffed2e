from itertools import combinations
from math import factorial

import numpy as np
import pytest

from alloyvae.explain import (
    EmptyBackgroundError,
    coalition_values,
    explain_alloy,
    global_importance,
    kernel_shap,
)


def shapley_brute_force(model_fn, instance, background):
    """Independent oracle: exact Shapley values of the interventional game
    by direct subset enumeration of the classic weighted formula."""
    m = len(instance)
    background = np.atleast_2d(background)

    def v(subset):
        rows = np.tile(background, (1, 1)).astype(float)
        rows = background.copy().astype(float)
        for j in subset:
            rows[:, j] = instance[j]
        return float(np.mean(model_fn(rows)))

    cache = {}
    def vc(subset):
        key = frozenset(subset)
        if key not in cache:
            cache[key] = v(subset)
        return cache[key]

    shap = np.zeros(m)
    others = list(range(m))
    for i in range(m):
        rest = [j for j in others if j != i]
        for size in range(m):
            for subset in combinations(rest, size):
                weight = factorial(size) * factorial(m - size - 1) / factorial(m)
                shap[i] += weight * (vc(set(subset) | {i}) - vc(subset))
    return vc(set()), shap


def test_single_feature_dependence():
    def model_fn(x):
        return 2.0 * x[:, 3]

    instance = np.arange(8, dtype=float)
    background = np.zeros((4, 8))
    base, shap = kernel_shap(model_fn, instance, background)
    assert base == pytest.approx(0.0, abs=1e-12)
    assert shap[3] == pytest.approx(2.0 * 3.0, abs=1e-6)
    mask = np.ones(8, bool)
    mask[3] = False
    assert np.allclose(shap[mask], 0.0, atol=1e-6)


def test_linear_model_closed_form():
    rng = np.random.default_rng(0)
    w = rng.normal(size=8)
    b = rng.normal(size=8)  # single background row

    def model_fn(x):
        return x @ w

    instance = rng.normal(size=8)
    base, shap = kernel_shap(model_fn, instance, b[None, :])
    # for a linear model with single-row background: shap_i = w_i (x_i - b_i)
    assert np.allclose(shap, w * (instance - b), atol=1e-6)
    assert base == pytest.approx(float(w @ b), abs=1e-9)


def test_constant_model():
    def model_fn(x):
        return np.full(x.shape[0], 0.77)

    base, shap = kernel_shap(model_fn, np.ones(8), np.zeros((3, 8)))
    assert base == pytest.approx(0.77)
    assert np.allclose(shap, 0.0, atol=1e-9)


@pytest.mark.parametrize("m", [3, 5, 8])
def test_kernel_shap_matches_brute_force_shapley(m):
    rng = np.random.default_rng(m)
    w1 = rng.normal(size=m)
    w2 = rng.normal(size=(m, m)) * 0.3

    def model_fn(x):
        return np.tanh(x @ w1) + np.sum((x @ w2) * x, axis=1) * 0.1

    instance = rng.normal(size=m)
    background = rng.normal(size=(5, m))
    base_k, shap_k = kernel_shap(model_fn, instance, background)
    base_b, shap_b = shapley_brute_force(model_fn, instance, background)
    assert base_k == pytest.approx(base_b, abs=1e-6)
    assert np.allclose(shap_k, shap_b, atol=1e-6)


def test_local_accuracy_exact():
    rng = np.random.default_rng(5)
    w = rng.normal(size=8)

    def model_fn(x):
        return 1.0 / (1.0 + np.exp(-(x @ w)))

    instance = rng.normal(size=8)
    background = rng.normal(size=(16, 8))
    base, shap = kernel_shap(model_fn, instance, background)
    assert base + shap.sum() == pytest.approx(float(model_fn(instance[None, :])[0]),
                                              abs=1e-6)


def test_missingness_identical_feature_gets_zero():
    rng = np.random.default_rng(6)

    def model_fn(x):
        return x.sum(axis=1)

    instance = rng.normal(size=8)
    background = rng.normal(size=(6, 8))
    background[:, 2] = instance[2]  # feature 2 identical everywhere
    _, shap = kernel_shap(model_fn, instance, background)
    assert shap[2] == pytest.approx(0.0, abs=1e-6)


def test_symmetry_interchangeable_features():
    def model_fn(x):
        return x[:, 0] * x[:, 1] + x[:, 0] + x[:, 1]

    instance = np.array([2.0, 2.0, 5.0])
    background = np.zeros((4, 3))
    _, shap = kernel_shap(model_fn, instance, background)
    assert shap[0] == pytest.approx(shap[1], abs=1e-9)


def test_empty_background_raises():
    with pytest.raises(EmptyBackgroundError):
        kernel_shap(lambda x: x.sum(axis=1), np.ones(4), np.zeros((0, 4)))


def test_coalition_values_shapes():
    def model_fn(x):
        return x.sum(axis=1)

    masks, values = coalition_values(model_fn, np.ones(4), np.zeros((3, 4)))
    assert masks.shape == (16, 4)
    assert values.shape == (16,)
    assert values[0] == pytest.approx(0.0)
    assert values[-1] == pytest.approx(4.0)


def test_explain_alloy_local_accuracy(random_model):
    from alloyvae.elements import parse_formula

    rng = np.random.default_rng(1)
    background = rng.normal(size=(24, 8))
    exp = explain_alloy(random_model, parse_formula("Fe20Ni20Co20Ti20Cu20"), background)
    assert exp.local_accuracy_gap() < 1e-6
    assert exp.shap_values.shape == (8,)


def test_global_importance_single_instance(records, random_model):
    gi = global_importance(random_model, [records[0]], [records[1], records[2]])
    assert np.allclose(gi.mean_abs, np.abs(gi.shap_values[0]))
    # local accuracy for every explained instance
    gaps = np.abs(gi.base_values + gi.shap_values.sum(axis=1) - gi.model_outputs)
    assert np.all(gaps < 1e-6)


def test_global_importance_background_subsample_seeded(records, random_model):
    sub = records[:40]
    a = global_importance(random_model, sub[:3], sub, max_background=8, seed=4)
    b = global_importance(random_model, sub[:3], sub, max_background=8, seed=4)
    assert np.array_equal(a.shap_values, b.shap_values)
