"""Cutoffs, experimentation and cutoff derivatives along a reputation grid.

    python scripts/reference_sweep.py --b 0.5 --out out/reference_sweep.csv
"""
import argparse
import csv
import math
from pathlib import Path

import numpy as np

from careercutoff import Primitives, solve_equilibrium
from careercutoff.statics import BoundaryHit, DegenerateError, analytic_derivative, check_rd, numeric_derivative

PARAMS = ("b", "pi", "theta", "kappa", "t_gate")


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--b", type=float, default=0.5)
    ap.add_argument("--rho", type=float, nargs="*", default=list(np.round(np.arange(0.05, 0.96, 0.05), 2)))
    ap.add_argument("--out", default="out/reference_sweep.csv")
    a = ap.parse_args(argv)

    p = Primitives(b=a.b)
    rd = check_rd(a.rho, p)
    on_rd = dict(zip(rd.grid, rd.verified))
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    with open(a.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rho", "cutoff", "eps", "rd_drift", "rd_verified"] +
                   [f"{k}_{kind}" for k in PARAMS for kind in ("analytic", "numeric")])
        for rho, drift in zip(rd.grid, rd.drift):
            eq = solve_equilibrium(rho, p)
            row = [rho, eq.cutoff, eq.eps, drift, on_rd[rho]]
            for k in PARAMS:
                try:
                    row += [analytic_derivative(k, rho, eq, p), numeric_derivative(k, rho, p, base=eq)]
                except (BoundaryHit, DegenerateError):
                    row += [math.nan, math.nan]
            w.writerow(row)
            print(f"rho={rho:.2f} c={eq.cutoff:8.4f} eps={eq.eps:.4f} drift={drift:+.4f}")
    print(f"rho_bar = {rd.rho_bar}; wrote {a.out}")


if __name__ == "__main__":
    main()
