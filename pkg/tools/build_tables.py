"""Build the binary mixing-enthalpy table for the 30-element vocabulary.

Well-known binaries carry hand-pinned regular-solution parameters taken from
the standard Miedema-based tabulations of equimolar liquid-alloy mixing
enthalpies.  The remaining pairs are filled by a Miedema-style surrogate
(electronegativity mismatch vs. electron-density mismatch) least-squares
fitted to the pinned set, so the full table stays smooth and symmetric.

Regenerates src/alloyvae/resources/pair_enthalpy.csv deterministically.
"""

import os

import numpy as np

from _oracle import RES_DIR, load_element_table

# Equimolar binary mixing enthalpies, kJ/mol (Omega_ij in dH = sum 4 Omega ci cj).
PINNED = {
    # 3d transition-metal binaries
    ("Fe", "Ni"): -2, ("Fe", "Co"): -1, ("Fe", "Cr"): -1, ("Fe", "Mn"): 0,
    ("Fe", "Cu"): 13, ("Fe", "V"): -7, ("Fe", "Ti"): -17, ("Fe", "Nb"): -16,
    ("Fe", "Zr"): -25, ("Fe", "Mo"): -2, ("Fe", "W"): 0, ("Fe", "Al"): -11,
    ("Fe", "Si"): -35, ("Co", "Ni"): 0, ("Co", "Cr"): -4, ("Co", "Mn"): -5,
    ("Co", "Cu"): 6, ("Co", "Ti"): -28, ("Co", "V"): -14, ("Co", "Zr"): -41,
    ("Co", "Nb"): -25, ("Co", "Mo"): -5, ("Co", "Al"): -19, ("Co", "Si"): -38,
    ("Ni", "Cr"): -7, ("Ni", "Mn"): -8, ("Ni", "Cu"): 4, ("Ni", "Ti"): -35,
    ("Ni", "V"): -18, ("Ni", "Zr"): -49, ("Ni", "Nb"): -30, ("Ni", "Mo"): -7,
    ("Ni", "Al"): -22, ("Ni", "Si"): -40, ("Cr", "Mn"): 2, ("Cr", "Cu"): 12,
    ("Cr", "Ti"): -7, ("Cr", "V"): -2, ("Cr", "Zr"): -12, ("Cr", "Nb"): -7,
    ("Cr", "Mo"): 0, ("Cr", "W"): 1, ("Cr", "Si"): -37, ("Cr", "Al"): -10,
    ("Mn", "Cu"): 4, ("Mn", "Ti"): -8, ("Mn", "V"): -1, ("Mn", "Si"): -45,
    ("Mn", "Al"): -19, ("Cu", "Ti"): -9, ("Cu", "V"): 5, ("Cu", "Zr"): -23,
    ("Cu", "Nb"): 3, ("Cu", "Zn"): 1, ("Cu", "Si"): -19, ("Cu", "Al"): -1,
    # refractory binaries
    ("Ti", "V"): -2, ("Ti", "Zr"): 0, ("Ti", "Nb"): 2, ("Ti", "Mo"): -4,
    ("Ti", "Ta"): 1, ("Ti", "W"): -6, ("Ti", "Hf"): 0, ("V", "Zr"): -4,
    ("V", "Nb"): -1, ("V", "Mo"): 0, ("V", "Ta"): -1, ("V", "W"): -1,
    ("V", "Hf"): -2, ("Zr", "Nb"): 4, ("Zr", "Mo"): -6, ("Zr", "Ta"): 3,
    ("Zr", "W"): -9, ("Zr", "Hf"): 0, ("Nb", "Mo"): -6, ("Nb", "Ta"): 0,
    ("Nb", "W"): -8, ("Nb", "Hf"): 4, ("Mo", "Ta"): -5, ("Mo", "W"): 0,
    ("Mo", "Hf"): -4, ("Ta", "W"): -7, ("Ta", "Hf"): 3, ("Hf", "W"): -6,
    ("W", "Re"): -4, ("Al", "Ti"): -30, ("Al", "V"): -16, ("Al", "Zr"): -44,
    ("Al", "Nb"): -18, ("Al", "Mo"): -5, ("Al", "Ta"): -19, ("Al", "Hf"): -39,
    ("Al", "W"): -2, ("Si", "Ti"): -66, ("Si", "Zr"): -84, ("Si", "Nb"): -56,
    # noble / precious binaries
    ("Ag", "Au"): -6, ("Ag", "Pd"): -7, ("Ag", "Cu"): 2, ("Ag", "Ni"): 15,
    ("Au", "Cu"): -9, ("Au", "Ni"): 7, ("Au", "Pd"): 0, ("Pd", "Ni"): 0,
    ("Pd", "Cu"): -14, ("Pt", "Ni"): -5, ("Pt", "Fe"): -13, ("Pt", "Co"): -9,
    ("Pt", "Cu"): -12, ("Pd", "Fe"): -4, ("Ru", "Rh"): 1, ("Ir", "Pt"): -1,
    # light-metal binaries
    ("Mg", "Li"): 0, ("Mg", "Zn"): -4, ("Mg", "Sn"): -9, ("Mg", "Al"): -2,
    ("Al", "Li"): -4, ("Al", "Zn"): 1, ("Al", "Cu"): -1, ("Al", "Sn"): 4,
    ("Al", "Sc"): -38, ("Al", "Y"): -38, ("Sn", "Ni"): -21, ("Sn", "Ti"): -21,
    ("Cu", "Sn"): 7, ("Zn", "Ti"): -15, ("Sc", "Ti"): 8, ("Y", "Zr"): 9,
}


def surrogate_features(elems, a, b):
    """Mismatch terms of a Miedema-style estimate for the pair (a, b)."""
    ea, eb = elems[a], elems[b]
    dchi2 = (ea["chi"] - eb["chi"]) ** 2
    # electron-density proxy from bulk modulus over molar volume
    na = (ea["k"] / ea["vm"]) ** (1.0 / 3.0)
    nb = (eb["k"] / eb["vm"]) ** (1.0 / 3.0)
    dn2 = (na - nb) ** 2
    dvec2 = (ea["vec"] - eb["vec"]) ** 2
    return np.array([dchi2, dn2, dvec2])


def main():
    elems = load_element_table()
    symbols = list(elems)

    pins = {}
    for (a, b), w in PINNED.items():
        pins[frozenset((a, b))] = float(w)

    feats = np.array(
        [surrogate_features(elems, a, b) for (a, b) in (tuple(sorted(p)) for p in pins)]
    )
    target = np.array([pins[frozenset(p)] for p in (tuple(sorted(p)) for p in pins)])
    coef, *_ = np.linalg.lstsq(feats, target, rcond=None)
    pred = feats @ coef
    resid = float(np.sqrt(np.mean((pred - target) ** 2)))
    print(f"surrogate fit over {len(target)} pinned pairs: coef={coef}, rmse={resid:.2f} kJ/mol")

    out = os.path.join(RES_DIR, "pair_enthalpy.csv")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(
            "# Binary regular-solution mixing-enthalpy parameters Omega_ij (kJ/mol),\n"
            "# dH_mix = sum_{i<j} 4 Omega_ij c_i c_j.  Common binaries pinned to the\n"
            "# standard Miedema-based equimolar tabulation; remaining pairs filled by a\n"
            "# least-squares Miedema-style surrogate (see tools/build_tables.py).\n"
            "symbol_a,symbol_b,omega_kj_mol\n"
        )
        n_pinned = 0
        for i, a in enumerate(symbols):
            for b in symbols[i + 1:]:
                key = frozenset((a, b))
                if key in pins:
                    w = pins[key]
                    n_pinned += 1
                else:
                    w = float(np.clip(surrogate_features(elems, a, b) @ coef, -65.0, 30.0))
                fh.write(f"{a},{b},{round(w, 1)}\n")
    n_total = len(symbols) * (len(symbols) - 1) // 2
    print(f"wrote {out}: {n_total} pairs ({n_pinned} pinned)")


if __name__ == "__main__":
    main()
