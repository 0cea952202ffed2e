"""Freeze golden eight-descriptor values for the featurizer tests.

Uses the standalone formulas in tools/_oracle.py (hand evaluation against the
shipped tables), never the alloyvae package, so the fixture stays an
independent oracle for the packaged implementation.
"""

import json
import os

from _oracle import RES_DIR, features8, load_element_table, load_pair_table
from make_dataset import parse_formula

FIXTURE_ALLOYS = [
    "Fe20Ni20Co20Ti20Cu20",
    "Ti25V25Nb25Zr25",
    "Al11Ti22V22Nb22Zr22",
    "Fe50Ni50",
]


def main():
    elems = load_element_table()
    omega = load_pair_table()
    golden = {}
    for formula in FIXTURE_ALLOYS:
        golden[formula] = features8(parse_formula(formula), elems, omega)
    out = os.path.join(RES_DIR, "featurize_golden.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(golden, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out}")
    for f, vals in golden.items():
        print(f, {k: round(v, 4) for k, v in vals.items()})


if __name__ == "__main__":
    main()
