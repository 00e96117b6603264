"""Goodness constant of (C S_n / sqrt(n)) mod 1 as a function of n and C.

Prints a table and writes plot-ready CSV. The wrapped Gaussian limit with
variance C^2 Var(Y) is included as a theta-series reference column.

    python scripts/lemma1_goodness.py --law uniform --scales 1 2 3
"""

import argparse
import math
from pathlib import Path

import numpy as np

from torusgap.config import parse_law_arg
from torusgap.law import goodness_constant, law_label, sum_density_iid, wrapped_density
from torusgap.reporting import write_csv
from torusgap.torus import TorusGrid


def theta_min(sigma, terms=60):
    k = np.arange(-terms, terms + 1)
    return float(np.exp(-((0.5 + k) ** 2) / (2 * sigma**2)).sum()
                 / (math.sqrt(2 * math.pi) * sigma))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--law", default="uniform")
    ap.add_argument("--scales", nargs="+", type=float, default=[1.0, 2.0, 3.0])
    ap.add_argument("--counts", nargs="+", type=int, default=[1, 2, 4, 8, 16, 32, 64, 128])
    ap.add_argument("--n", type=int, default=4096, help="torus grid size")
    ap.add_argument("--out", type=Path, default=Path("results/lemma1.csv"))
    args = ap.parse_args()

    law = parse_law_arg(args.law)
    grid = TorusGrid(args.n)
    rows = []
    for m in args.counts:
        q = sum_density_iid(law, m)
        for C in args.scales:
            good = goodness_constant(wrapped_density(q, C, grid))
            limit = theta_min(C * math.sqrt(law.variance))
            rows.append({"count": m, "C": C, "goodness": good, "limit": limit})
            print(f"{law_label(law)} n={m:4d} C={C:g}: goodness={good:.6f} (limit {limit:.6f})")
    write_csv(args.out, rows, ["count", "C", "goodness", "limit"], "lemma1_goodness")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
