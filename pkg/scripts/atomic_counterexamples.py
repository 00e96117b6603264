"""Search for near-invariant sines under atomic laws, and show how the grid
backend hides them.

For each case the exact residual ||f_n - A_t f_n||_1 of f_n = (pi/2) sin(2 pi n x)
is reported. The last block compares the exact symbol at the near-invariant
mode with the grid-backend symbol at several grid sizes: linear atom splitting
smooths the operator, so the grid overstates the residual until it refines.

    python scripts/atomic_counterexamples.py
"""

import argparse
import math

from torusgap.law import Atoms
from torusgap.operator import MultiplierOperator, build_grid_operator, multiplier_symbol
from torusgap.torus import TorusGrid
from torusgap.verify import COUNTEREXAMPLE_CASES, NotFound, counterexample_search


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n-max", type=int, default=100_000)
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4])
    args = ap.parse_args()

    for atoms, t, eps in COUNTEREXAMPLE_CASES:
        law = Atoms(atoms)
        rep = counterexample_search(law, t, eps, args.n_max)
        print(f"{atoms} t={t:g} eps={eps:g}: n={rep.n} residual={rep.residual:.3e} "
              f"pigeonhole bound={rep.pigeonhole_bound}")

    # how fast the first hit grows as eps shrinks for the irrational atom
    law = Atoms(((math.sqrt(2) / 2, 1.0),))
    for eps in args.eps:
        try:
            rep = counterexample_search(law, 1.0, eps, args.n_max)
            print(f"sqrt(2)/2 atom, eps={eps:g}: n={rep.n} residual={rep.residual:.3e}")
        except NotFound as exc:
            print(f"sqrt(2)/2 atom, eps={eps:g}: none below {args.n_max} "
                  f"(best n={exc.report.n})")

    # grid smoothing: the split atom has |lambda_k| < 1, so the grid backend
    # overstates |1 - lambda_k| at the near-invariant mode until it refines
    law, t = Atoms(((math.sqrt(2) / 2, 1.0),)), 0.5
    k = counterexample_search(law, t, 0.01, args.n_max).n
    exact = abs(1 - multiplier_symbol(MultiplierOperator(law, t, cutoff=k), k))
    print(f"sqrt(2)/2 atom at t=0.5: near-invariant mode k={k}, exact |1 - lambda_k|={exact:.3e}")
    for n in (2**12, 2**14, 2**16, 2**18, 2**20):
        op = build_grid_operator(law, t, TorusGrid(n))
        print(f"  grid n={n:8d}: |1 - lambda_k| = {abs(1 - multiplier_symbol(op, k)):.3e}")

if __name__ == "__main__":
    main()
