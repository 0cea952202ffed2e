import numpy as np
import pytest

from alloyvae import design
from alloyvae.elements import parse_formula

from conftest import make_random_model


@pytest.fixture(scope="module")
def model():
    return make_random_model(seed=1, hidden=(24, 24))


def test_screen_empty(model):
    assert design.screen(model, [], 0.5) == []


def test_screen_cutoff_zero_returns_all_sorted(model):
    cands = [parse_formula(f) for f in
             ("Fe20Ni20Co20Ti20Cu20", "Ti25V25Nb25Zr25", "Al30Cu70", "Fe50Ni50")]
    out = design.screen(model, cands, 0.0)
    assert len(out) == len(cands)
    probs = [p for _, p in out]
    assert probs == sorted(probs, reverse=True)


def test_screen_matches_accuracy_contract(model, records):
    sample = records[:60]
    comps = [r.composition for r in sample]
    kept = design.screen(model, comps, 0.5)
    from alloyvae.featurize import features_matrix

    probs = model.classify_features(features_matrix(comps))
    assert len(kept) == int((probs >= 0.5).sum())


def test_screen_stable_tie_order(model):
    c = parse_formula("Fe50Ni50")
    out = design.screen(model, [c, c, c], 0.0)
    assert [comp for comp, _ in out] == [c, c, c]


def test_generate_deterministic_and_flags(model):
    z = np.array([0.3, -0.4])
    a = design.generate(model, z, 0.9)
    b = design.generate(model, z, 0.9)
    assert a.composition == b.composition
    assert a.recheck_p == b.recheck_p
    assert a.consistent == ((a.recheck_p >= 0.5) == (0.9 >= 0.5))


def test_generate_rejects_bad_target(model):
    with pytest.raises(ValueError):
        design.generate(model, np.zeros(2), 1.5)


def test_invert_converged_start(model, records):
    # hunt for an alloy the random model already scores above a tiny cutoff
    comp = records[0].composition
    p = model.classify(comp)
    trace = design.invert(model, comp, cutoff=min(p - 1e-6, 0.99), max_iters=5)
    assert trace.converged
    assert len(trace.steps) == 1


def test_invert_trace_contract(model):
    comp = parse_formula("Fe20Ni20Co20Ti20Cu20")
    p0 = model.classify(comp)
    trace = design.invert(model, comp, cutoff=1.0 - 1e-9, max_iters=4)
    # cutoff ~1 is unreachable: full-length unconverged trace
    assert not trace.converged
    assert len(trace.steps) == 5
    assert trace.steps[0].probability == pytest.approx(p0)
    # each following alloy is the decode of the previous step at 1 - p
    for prev, nxt in zip(trace.steps, trace.steps[1:]):
        regenerated = model.decode_composition(prev.latent, 1.0 - prev.probability)
        assert regenerated == nxt.alloy


def test_invert_max_iters_one(model):
    comp = parse_formula("Al30Cu70")
    trace = design.invert(model, comp, cutoff=1.0 - 1e-9, max_iters=1)
    assert not trace.converged
    assert len(trace.steps) in (1, 2)


def test_invert_converged_flag_matches_rule(model):
    comp = parse_formula("Ti25V25Nb25Zr25")
    trace = design.invert(model, comp, cutoff=0.6, max_iters=6)
    assert trace.converged == (trace.steps[-1].probability > 0.6)
    assert len(trace.steps) <= 7


def test_grid_study_cardinality(model):
    rows = design.grid_study(model, np.linspace(-0.1, 0.1, 3),
                             np.linspace(-0.5, -0.3, 3), [0.0, 1.0])
    assert len(rows) == 18
    # recheck consistency by construction
    for r in rows:
        regenerated = design.generate(model, np.array([r.z1, r.z2]), r.target_p)
        assert regenerated.recheck_p == r.recheck_p


def test_latent_map_density_normalizes(model, records):
    lm = design.latent_map(model, records[:300])
    cell = (lm.z1_grid[1] - lm.z1_grid[0]) * (lm.z2_grid[1] - lm.z2_grid[0])
    mass = float(lm.density.sum() * cell)
    assert abs(mass - 1.0) <= 0.02
    assert np.all(lm.density >= 0.0)
    assert len(lm.points) == 300
    p = lm.points[0]
    assert set(p) == {"z", "probability", "label", "n_elements", "formula"}


def test_latent_map_single_point(model, records):
    lm = design.latent_map(model, records[:1])
    # density peak sits at the point
    i, j = np.unravel_index(np.argmax(lm.density), lm.density.shape)
    z = lm.points[0]["z"]
    assert lm.z1_grid[j] == pytest.approx(z[0], abs=(lm.z1_grid[1] - lm.z1_grid[0]) * 1.5)
    assert lm.z2_grid[i] == pytest.approx(z[1], abs=(lm.z2_grid[1] - lm.z2_grid[0]) * 1.5)


def test_latent_map_empty_raises(model):
    with pytest.raises(design.EmptyInputError):
        design.latent_map(model, [])


def test_group_probe_combinatorics(model):
    clouds = design.group_probe(model, {"four": ["Fe", "Ni", "Cr", "Co"],
                                        "six": ["Ti", "V", "Zr", "Nb", "Mo", "Ta"]})
    assert clouds["four"].shape == (1, 2)
    assert clouds["six"].shape == (15, 2)


def test_group_probe_too_small(model):
    with pytest.raises(design.GroupTooSmallError):
        design.group_probe(model, {"tiny": ["Fe", "Ni", "Cr"]})


def test_default_groups_are_probeable(model):
    clouds = design.group_probe(model, design.DEFAULT_GROUPS)
    assert set(clouds) == {"noble", "refractory", "magnetic"}
    for arr in clouds.values():
        assert np.all(np.isfinite(arr))
