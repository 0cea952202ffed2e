import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alloyvae.elements import (
    Composition,
    EmptyFormulaError,
    MalformedTokenError,
    NegativeEntryError,
    UnknownElementError,
    ZeroSumError,
    element_table,
    format_standard,
    from_vector,
    pair_table,
    parse_formula,
    to_vector,
    vocabulary,
)


def test_vocabulary_is_frozen_30():
    vocab = vocabulary()
    assert len(vocab) == 30
    assert len(set(vocab)) == 30
    # canonical order starts with the most frequent dataset elements
    assert vocab[:6] == ("Fe", "Ni", "Cr", "Co", "Al", "Cu")


def test_element_table_covers_vocabulary_with_positive_values():
    table = element_table()
    for sym in vocabulary():
        p = table[sym]
        assert p.atomic_radius > 0 and p.vec > 0 and p.electronegativity > 0
        assert p.melting_t > 0 and p.bulk_modulus > 0 and p.molar_volume > 0


def test_pair_table_symmetric_and_complete():
    pairs = pair_table()
    vocab = vocabulary()
    for i, a in enumerate(vocab):
        assert pairs.omega(a, a) == 0.0
        for b in vocab[i + 1:]:
            assert pairs.omega(a, b) == pairs.omega(b, a)


def test_parse_equimolar_quinary():
    c = parse_formula("Fe20Ni20Co20Ti20Cu20")
    assert c.fractions == pytest.approx(
        {"Fe": 0.2, "Ni": 0.2, "Co": 0.2, "Ti": 0.2, "Cu": 0.2}
    )


def test_parse_single_element():
    assert parse_formula("Al").fractions == {"Al": 1.0}


def test_parse_decimal_subscripts():
    c = parse_formula("Al1.4Co0.9Cr1.4Cu0.5Fe0.9Ni1")
    assert c["Cu"] == pytest.approx(0.5 / 6.1)
    assert c["Al"] == pytest.approx(1.4 / 6.1)
    assert sum(c.fractions.values()) == pytest.approx(1.0, abs=1e-12)


def test_parse_repeated_symbol_accumulates():
    assert parse_formula("FeFe").fractions == {"Fe": 1.0}
    c = parse_formula("Fe1Ni1Fe2")
    assert c["Fe"] == pytest.approx(0.75)


@pytest.mark.parametrize("bad,exc", [
    ("", EmptyFormulaError),
    ("   ", EmptyFormulaError),
    ("Fe0Ni0", EmptyFormulaError),
    ("Xx20Fe80", UnknownElementError),
    ("Fe20 Ni80", MalformedTokenError),
    ("20Fe", MalformedTokenError),
    ("Fe20+Ni80", MalformedTokenError),
])
def test_parse_errors(bad, exc):
    with pytest.raises(exc):
        parse_formula(bad)


def test_format_standard_matches_worked_example():
    c = Composition({"Fe": 0.9 / 6.1, "Ni": 1 / 6.1, "Cr": 1.4 / 6.1,
                     "Co": 0.9 / 6.1, "Al": 1.4 / 6.1, "Cu": 0.5 / 6.1})
    assert format_standard(c) == "Fe14Ni16Cr22Co14Al22Cu8"


def test_format_standard_trivials():
    assert format_standard(Composition({"Al": 1.0})) == "Al100"
    c = Composition({"Ti": 0.25, "V": 0.25, "Nb": 0.25, "Zr": 0.25})
    assert format_standard(c) == "Ti25V25Nb25Zr25"


def test_to_vector_one_hot():
    v = to_vector(Composition({"Fe": 1.0}))
    assert v[list(vocabulary()).index("Fe")] == 1.0
    assert v.sum() == 1.0


def test_vector_round_trip_exact_on_parsed_alloys():
    for f in ("Fe20Ni20Co20Ti20Cu20", "Al11Ti22V22Nb22Zr22", "Al4Ti23Mo23V23Ta23"):
        c = parse_formula(f)
        assert from_vector(to_vector(c)) == c


def test_from_vector_uniform():
    c = from_vector(np.full(30, 1.0 / 30.0))
    assert c.n_elements() == 30
    assert all(abs(f - 1 / 30) < 1e-12 for f in c.fractions.values())


def test_from_vector_errors():
    v = np.zeros(30)
    with pytest.raises(ZeroSumError):
        from_vector(v)
    v = np.full(30, 1.0 / 30.0)
    v[0] = -0.5
    with pytest.raises(NegativeEntryError):
        from_vector(v)


@st.composite
def compositions(draw):
    vocab = vocabulary()
    n = draw(st.integers(min_value=1, max_value=8))
    symbols = draw(st.permutations(vocab).map(lambda p: list(p)[:n]))
    weights = draw(st.lists(st.floats(min_value=0.01, max_value=1.0),
                            min_size=n, max_size=n))
    total = sum(weights)
    return Composition({s: w / total for s, w in zip(symbols, weights)})


@given(compositions())
@settings(max_examples=60, deadline=None)
def test_parse_format_parse_idempotent_within_truncation(c):
    f1 = format_standard(c)
    reparsed = parse_formula(f1)
    n = c.n_elements()
    for sym, frac in c.items():
        # truncation loses at most 0.01 per element fraction...
        sub = int(100.0 * frac)
        assert -1e-12 <= frac - sub / 100.0 <= 0.01 + 1e-12
        # ...and renormalizing the shrunken total redistributes at most
        # frac * n/100 / (1 - n/100) on top of that
        slack = 0.01 + frac * (n / 100.0) / (1.0 - n / 100.0) + 1e-12
        assert abs(reparsed[sym] - frac) <= slack


@given(compositions())
@settings(max_examples=60, deadline=None)
def test_vector_bijection_property(c):
    assert from_vector(to_vector(c)) == c
