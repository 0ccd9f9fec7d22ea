#!/usr/bin/env python3
"""Pit the optimal POVM against random rescaled competitors.

For random linearly independent families, competitors reuse the dual
directions with arbitrary weights. Those that stay valid POVMs are scored;
the script reports the largest amount any of them beat lambda_min(G) by
(it should never be positive beyond round-off).
"""

from __future__ import annotations

import argparse

import numpy as np

from udisc import StateFamily, UnambiguousPOVM, dual_family, gram, validate
from udisc.errors import NotAPOVM
from udisc.sampling import random_states


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--families", type=int, default=100)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    rng = np.random.default_rng(a.seed)
    worst, valid = -np.inf, 0
    for _ in range(a.families):
        n = int(rng.integers(2, 10))
        fam = StateFamily(random_states(n, int(rng.integers(n, 16)), rng))
        gf = gram(fam)
        phi = dual_family(gf).coeffs.T @ fam.states
        norms = np.linalg.norm(phi, axis=1) ** 2
        for _ in range(a.trials):
            w = rng.dirichlet(np.ones(n)) * rng.uniform(0.5, 1.5) / norms
            povm = UnambiguousPOVM.dense([w[i] * np.outer(phi[i], phi[i].conj()) for i in range(n)], fam.labels)
            try:
                report = validate(povm, fam)
            except NotAPOVM:
                continue
            valid += 1
            worst = max(worst, report.q_min - gf.lambda_min)
    print(f"valid competitors: {valid}")
    print(f"max(q_min - lambda_min) = {worst:.3e}")


if __name__ == "__main__":
    main()
