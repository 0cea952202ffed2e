"""Element property tables, composition parsing/formatting and vectorization.

All compositions live on a fixed 30-element vocabulary frozen in
``resources/vocabulary.json`` (ordered by descending dataset frequency, ties
broken by atomic number).  Vectors produced by :func:`to_vector` follow that
canonical order, as do formulas emitted by :func:`format_standard`.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

GAS_CONSTANT = 8.314  # J/(mol K)


class CompositionError(ValueError):
    """Base class for composition parsing/validation failures."""


class UnknownElementError(CompositionError):
    pass


class EmptyFormulaError(CompositionError):
    pass


class MalformedTokenError(CompositionError):
    pass


class NegativeEntryError(CompositionError):
    pass


class ZeroSumError(CompositionError):
    pass


class MissingElementPropertyError(KeyError):
    pass


class MissingPairEnthalpyError(KeyError):
    pass


@dataclass(frozen=True)
class ElementProps:
    symbol: str
    atomic_radius: float  # pm
    vec: float  # valence electron count
    electronegativity: float  # Pauling
    melting_t: float  # K
    bulk_modulus: float  # GPa
    molar_volume: float  # cm^3/mol

    def __post_init__(self):
        for name in ("atomic_radius", "vec", "electronegativity", "melting_t",
                     "bulk_modulus", "molar_volume"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{self.symbol}: {name} must be strictly positive")


class PairEnthalpyTable:
    """Symmetric binary mixing-enthalpy parameters Omega_ij in kJ/mol."""

    def __init__(self, entries: dict[tuple[str, str], float]):
        table: dict[tuple[str, str], float] = {}
        for (a, b), w in entries.items():
            if a == b and w != 0.0:
                raise ValueError(f"Omega_{a}{a} must be 0, got {w}")
            prev = table.get((b, a))
            if prev is not None and prev != w:
                raise ValueError(f"asymmetric pair {a}-{b}: {w} vs {prev}")
            table[(a, b)] = w
            table[(b, a)] = w
        self._table = table

    def omega(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        try:
            return self._table[(a, b)]
        except KeyError:
            raise MissingPairEnthalpyError(f"no mixing enthalpy for pair {a}-{b}") from None

    def __len__(self):
        return len(self._table) // 2


def _read_table_rows(name: str) -> list[dict[str, str]]:
    text = resources.files("alloyvae.resources").joinpath(name).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(lines))


@lru_cache(maxsize=1)
def vocabulary() -> tuple[str, ...]:
    """The 30 vocabulary symbols in canonical (frequency) order."""
    text = resources.files("alloyvae.resources").joinpath("vocabulary.json").read_text()
    return tuple(json.loads(text)["elements"])


@lru_cache(maxsize=1)
def vocabulary_hash() -> str:
    return hashlib.sha256(",".join(vocabulary()).encode()).hexdigest()


@lru_cache(maxsize=1)
def element_index() -> dict[str, int]:
    return {sym: i for i, sym in enumerate(vocabulary())}


@lru_cache(maxsize=1)
def element_table() -> dict[str, ElementProps]:
    table = {}
    for row in _read_table_rows("elements.csv"):
        props = ElementProps(
            symbol=row["symbol"],
            atomic_radius=float(row["atomic_radius_pm"]),
            vec=float(row["vec"]),
            electronegativity=float(row["electronegativity"]),
            melting_t=float(row["melting_t_k"]),
            bulk_modulus=float(row["bulk_modulus_gpa"]),
            molar_volume=float(row["molar_volume_cm3mol"]),
        )
        if props.symbol in table:
            raise ValueError(f"duplicate element row {props.symbol}")
        table[props.symbol] = props
    return table


@lru_cache(maxsize=1)
def pair_table() -> PairEnthalpyTable:
    entries = {}
    for row in _read_table_rows("pair_enthalpy.csv"):
        entries[(row["symbol_a"], row["symbol_b"])] = float(row["omega_kj_mol"])
    return PairEnthalpyTable(entries)


class Composition:
    """Normalized element -> mole fraction map over the vocabulary.

    Fractions are validated to lie in [0, 1] and to sum to 1 within 1e-9;
    zero entries are dropped.  Instances are immutable and hashable on their
    support, so they are safe to share across threads.
    """

    __slots__ = ("_fractions",)

    def __init__(self, fractions: dict[str, float]):
        vocab = element_index()
        kept = {}
        total = 0.0
        for sym, frac in fractions.items():
            if sym not in vocab:
                raise UnknownElementError(f"element {sym!r} not in the 30-element vocabulary")
            if frac < 0.0:
                raise NegativeEntryError(f"negative fraction for {sym}: {frac}")
            if frac > 0.0:
                kept[sym] = float(frac)
            total += frac
        if not kept:
            raise ZeroSumError("composition has no positive fractions")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"fractions sum to {total!r}, expected 1 within 1e-9")
        if any(f > 1.0 for f in kept.values()):
            raise ValueError("fraction exceeds 1")
        self._fractions = kept

    @property
    def fractions(self) -> dict[str, float]:
        return dict(self._fractions)

    def __getitem__(self, sym: str) -> float:
        return self._fractions.get(sym, 0.0)

    def items(self):
        return self._fractions.items()

    def support(self) -> set[str]:
        return set(self._fractions)

    def n_elements(self) -> int:
        return len(self._fractions)

    def __eq__(self, other):
        return isinstance(other, Composition) and self._fractions == other._fractions

    def __hash__(self):
        return hash(tuple(sorted(self._fractions.items())))

    def __repr__(self):
        return f"Composition({self._fractions!r})"


_TOKEN = re.compile(r"([A-Z][a-z]?)(\d+(?:\.\d+)?|\.\d+)?")


def parse_formula(text: str) -> Composition:
    """Parse a formula like ``Fe20Ni20Co20Ti20Cu20`` or ``Al1.4Co0.9Cr1.4...``.

    Missing subscripts mean 1; repeated symbols accumulate; subscripts are
    normalized by their total.
    """
    stripped = text.strip()
    if not stripped:
        raise EmptyFormulaError("empty formula")
    counts: dict[str, float] = {}
    pos = 0
    for m in _TOKEN.finditer(stripped):
        if m.start() != pos:
            raise MalformedTokenError(f"unparseable text at {stripped[pos:m.start()]!r} in {text!r}")
        sym, sub = m.group(1), m.group(2)
        if sym not in element_index():
            raise UnknownElementError(f"unknown element {sym!r} in {text!r}")
        counts[sym] = counts.get(sym, 0.0) + (float(sub) if sub else 1.0)
        pos = m.end()
    if pos != len(stripped):
        raise MalformedTokenError(f"unparseable trailing text {stripped[pos:]!r} in {text!r}")
    total = sum(counts.values())
    if total <= 0.0:
        raise EmptyFormulaError(f"all subscripts zero in {text!r}")
    return Composition({s: v / total for s, v in counts.items()})


def format_standard(c: Composition) -> str:
    """Standard integer-percent formula: truncated 100*fraction, canonical
    element order, zero subscripts omitted.  The total may fall short of 100.
    """
    parts = []
    for sym in vocabulary():
        sub = int(100.0 * c[sym])
        if sub > 0:
            parts.append(f"{sym}{sub}")
    return "".join(parts)


def to_vector(c: Composition) -> np.ndarray:
    v = np.zeros(len(vocabulary()), dtype=np.float64)
    for sym, frac in c.items():
        v[element_index()[sym]] = frac
    return v


def from_vector(v: np.ndarray) -> Composition:
    """Inverse of :func:`to_vector`; renormalizes sums that drift beyond 1e-9."""
    v = np.asarray(v, dtype=np.float64)
    vocab = vocabulary()
    if v.shape != (len(vocab),):
        raise ValueError(f"expected shape ({len(vocab)},), got {v.shape}")
    v = np.where((v < 0.0) & (v > -1e-12), 0.0, v)
    if np.any(v < 0.0):
        raise NegativeEntryError("negative entry in composition vector")
    total = float(v.sum())
    if total <= 1e-12:
        raise ZeroSumError("composition vector sums to zero")
    if abs(total - 1.0) > 1e-9:
        v = v / total
    return Composition({sym: float(v[i]) for i, sym in enumerate(vocab) if v[i] > 0.0})
