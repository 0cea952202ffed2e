"""Standalone composition featurization used by the data-generation tools.

Deliberately does NOT import the alloyvae package: this module doubles as the
independent oracle that the packaged featurizer is tested against, so it reads
the shipped CSV tables directly and spells out every formula by hand.
"""

import csv
import math
import os

RES_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "alloyvae", "resources")
GAS_CONSTANT = 8.314  # J/(mol K)


def read_csv(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for row in reader:
        rows.append(row)
    return rows


def load_element_table():
    table = {}
    for row in read_csv(os.path.join(RES_DIR, "elements.csv")):
        table[row["symbol"]] = {
            "radius": float(row["atomic_radius_pm"]),
            "vec": float(row["vec"]),
            "chi": float(row["electronegativity"]),
            "tm": float(row["melting_t_k"]),
            "k": float(row["bulk_modulus_gpa"]),
            "vm": float(row["molar_volume_cm3mol"]),
        }
    return table


def load_pair_table():
    omega = {}
    for row in read_csv(os.path.join(RES_DIR, "pair_enthalpy.csv")):
        a, b, w = row["symbol_a"], row["symbol_b"], float(row["omega_kj_mol"])
        omega[(a, b)] = w
        omega[(b, a)] = w
    return omega


def features8(fractions, elems, omega):
    """Return dict of the eight descriptors for a fraction map {symbol: c}."""
    syms = sorted(fractions)
    cs = [fractions[s] for s in syms]
    k = sum(c * elems[s]["k"] for s, c in zip(syms, cs))
    vm = sum(c * elems[s]["vm"] for s, c in zip(syms, cs))
    tm = sum(c * elems[s]["tm"] for s, c in zip(syms, cs))
    vec = sum(c * elems[s]["vec"] for s, c in zip(syms, cs))
    rbar = sum(c * elems[s]["radius"] for s, c in zip(syms, cs))
    delta = math.sqrt(sum(c * (1.0 - elems[s]["radius"] / rbar) ** 2 for s, c in zip(syms, cs)))
    chibar = sum(c * elems[s]["chi"] for s, c in zip(syms, cs))
    dchi = math.sqrt(sum(c * (elems[s]["chi"] - chibar) ** 2 for s, c in zip(syms, cs)))
    ds = -GAS_CONSTANT * sum(c * math.log(c) for c in cs if c > 0.0)
    dh = 0.0
    for i in range(len(syms)):
        for j in range(i + 1, len(syms)):
            dh += 4.0 * omega[(syms[i], syms[j])] * cs[i] * cs[j]
    return {
        "bulk_modulus": k,
        "molar_volume": vm,
        "melting_t": tm,
        "vec": vec,
        "delta": delta,
        "delta_chi": dchi,
        "ds_mix": ds,
        "dh_mix": dh,
    }
