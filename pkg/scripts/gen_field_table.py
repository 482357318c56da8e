#!/usr/bin/env python3
"""Generate the pinned finite-field modulus table.

Writes src/wittcrystal/data/conway_table.json with Conway polynomials for
all primes p <= 31 and degrees m <= 8 (the default tower bound), plus a
few extra degrees for the small primes that the slope-factorization
solver leans on.  Rerunning reproduces the file bit for bit.
"""

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from wittcrystal._conway import conway_polynomial  # noqa: E402

PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
# The factorization solver enlarges residue fields along the pinned tower;
# small primes get extra headroom.  Degrees whose maximal-subfield norm
# conditions make the Conway scan expensive (e.g. 30 = 2*3*5 over F_2) are
# left to on-demand computation.
EXTRA_DEGREES = {
    2: list(range(1, 29)) + [29, 31, 32],
    3: list(range(1, 13)) + [13],
    5: list(range(1, 11)) + [11, 13],
    7: list(range(1, 9)),
}
DEFAULT_MAX = 8

EXPECTED_PINS = {
    (2, 4): [1, 1, 0, 0, 1],  # x^4 + x + 1
    (3, 2): [2, 2, 1],        # x^2 + 2x + 2
}


def main():
    out = {"version": 1, "description": "Conway polynomial table", "moduli": {}}
    for p in PRIMES:
        degrees = EXTRA_DEGREES.get(p, list(range(1, DEFAULT_MAX + 1)))
        table = {}
        for m in sorted(degrees):
            t0 = time.time()
            table[m] = conway_polynomial(p, m, table)
            dt = time.time() - t0
            if dt > 1.0:
                print(f"  p={p} m={m}: {dt:.1f}s", flush=True)
        print(f"p={p}: degrees {sorted(degrees)} done", flush=True)
        out["moduli"][str(p)] = {str(m): f for m, f in table.items()}

    for (p, m), pin in EXPECTED_PINS.items():
        got = out["moduli"][str(p)][str(m)]
        if got != pin:
            raise SystemExit(f"pinned modulus mismatch at ({p},{m}): {got} != {pin}")

    dest = Path(__file__).resolve().parents[1] / "src" / "wittcrystal" / "data"
    dest.mkdir(parents=True, exist_ok=True)
    path = dest / "conway_table.json"
    path.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
