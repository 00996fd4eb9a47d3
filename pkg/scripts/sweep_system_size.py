#!/usr/bin/env python3
"""Plateau-ratio scan over system size for a chosen model.

Prints the diagonal-to-benchmark ratios per sector so finite-size drift of the
multiplicity signals can be eyeballed quickly; no bootstrap is run.
"""

import argparse

import numpy as np

from symboot.models import HamiltonianSpec, build_model
from symboot.spectral import diagonalize, plateau_matrix, sector_weights

MODELS = {"obrien_fendley": (2, 7), "kt_spin1": (2, 6), "ashkin_teller": (3, 5), "quantum_torus": (3, 6)}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("model", choices=sorted(MODELS))
    parser.add_argument("--realizations", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    lo, hi = MODELS[args.model]
    sizes = [L for L in range(lo, hi + 1)]
    if args.model == "quantum_torus":
        sizes = [L for L in sizes if L % 3 == 0]
    for L in sizes:
        ratios = []
        for i in range(args.realizations):
            spec = HamiltonianSpec(args.model, L=L, theta=0.3, rng_seed=args.seed + i)
            H, proj = build_model(spec)
            spectral = diagonalize(H)
            w = sector_weights(spectral, proj)
            p = plateau_matrix(w, spectral.energies)
            ratios.append(np.diag(p.K) / p.R)
        mean = np.mean(ratios, axis=0)
        print(f"L={L}: K/R = {np.round(mean, 4).tolist()}")


if __name__ == "__main__":
    main()
