"""Regenerate ``data/oracle_values.json`` from the brute-force oracles.

Inputs are fixed literal-seeded draws from ``random.Random`` so the file
does not depend on numpy's generators.
"""

import json
import random
from pathlib import Path

import oracles


def _pulse(seed, N):
    r = random.Random(seed)
    return [complex(r.gauss(0, 1), r.gauss(0, 1)) for _ in range(N)]


def _c(v):
    return [[a.real, a.imag] for a in v]


def main():
    cases = []
    for seed, N, L, mu in [(11, 8, 1, 0.5), (12, 8, 2, 1.0), (13, 9, 2, 0.1), (14, 10, 3, 2.0)]:
        x = _pulse(seed, N)
        z = _pulse(seed + 100, N)
        Z = oracles.trace(x, L)
        cases.append({
            "seed": seed, "N": N, "L": L, "mu": mu,
            "x": _c(x), "z": _c(z),
            "trace": Z,
            "Y": [_c(row) for row in oracles.transformed(x, L)],
            "loss": oracles.loss(z, Z, L, mu),
            "grad": _c(oracles.fd_gradient(z, Z, L, mu)),
        })
    out = Path(__file__).with_name("data") / "oracle_values.json"
    out.write_text(json.dumps({"cases": cases}, indent=1) + "\n")


if __name__ == "__main__":
    main()
