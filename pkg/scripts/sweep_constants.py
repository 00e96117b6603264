"""Fit c in gap_p(t) >= c t^2 for several laws and grid sizes.

Writes one CSV row per (law, n, p, t) with gap and gap / t^2, and prints the
fitted constants. The n column shows how stable c_est is under refinement.

    python scripts/sweep_constants.py --out results/constants.csv
"""

import argparse
import math
from pathlib import Path

from torusgap.config import SHORTHANDS
from torusgap.gap import default_t_list, sweep_fit_constant
from torusgap.reporting import write_csv
from torusgap.torus import TorusGrid


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--laws", nargs="+", default=sorted(SHORTHANDS))
    ap.add_argument("--sizes", nargs="+", type=int, default=[1024, 2048, 4096, 8192])
    ap.add_argument("--points", type=int, default=24, help="number of t values")
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--out", type=Path, default=Path("results/constants.csv"))
    args = ap.parse_args()

    ts = default_t_list(args.points)
    rows = []
    for name in args.laws:
        law = SHORTHANDS[name]()
        for n in args.sizes:
            sw = sweep_fit_constant(law, (1.0, 2.0, math.inf), ts, TorusGrid(n), args.threads)
            for r in sw.reports:
                rows.append({"law": name, "n": n, **r.as_row()})
            by_p = "  ".join(f"p={p}: {v:.6f}" for p, v in sw.c_est_by_p.items())
            print(f"{name:9s} n={n:5d}  c_est={sw.c_est:.6f}  {by_p}")
    write_csv(args.out, rows, ["law", "n", "p", "t", "t2", "gap", "gap_over_t2", "method"],
              "sweep_constants")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
