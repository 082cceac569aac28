"""Where does a steeper signal raise the cutoff?

For each instance on a (b, pi, theta, rho) grid, compare the sign of the
re-solved dc/dtheta with the sign of dp/dtheta at the cutoff. Steepening
p(.) about the point where p = 1/2 lowers p below that point, so cutoffs
with p(c) < 1/2 tend to rise with theta. Output is one CSV row per instance.

    python scripts/theta_sign_map.py --out out/theta_sign_map.csv
"""
import argparse
import csv
import itertools
from pathlib import Path

from careercutoff import Primitives, solve_equilibrium, success_prob
from careercutoff.gaussian import success_prob_partial
from careercutoff.statics import BoundaryHit, numeric_derivative


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/theta_sign_map.csv")
    a = ap.parse_args(argv)
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    n = pos = explained = 0
    with open(a.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["b", "pi", "theta", "rho", "cutoff", "p_at_cutoff", "dp_dtheta", "dc_dtheta"])
        for b, pi, th, rho in itertools.product((0.25, 0.5, 1.0, 2.0), (0.3, 0.5, 0.7), (0.7, 1.0, 1.5),
                                                (0.1, 0.3, 0.5, 0.7, 0.9)):
            p = Primitives(b=b, pi=pi, theta=th)
            eq = solve_equilibrium(rho, p)
            if not eq.interior:
                continue
            try:
                d = numeric_derivative("theta", rho, p, base=eq)
            except BoundaryHit:
                continue
            dp = success_prob_partial(eq.cutoff, rho, p, "theta")
            w.writerow([b, pi, th, rho, eq.cutoff, success_prob(eq.cutoff, rho, p), dp, d])
            n += 1
            pos += d > 1e-8
            explained += (d > 1e-8) == (dp < 0)
    print(f"{n} interior instances, dc/dtheta > 0 at {pos}; sign of -dp/dtheta predicts it in {explained}")


if __name__ == "__main__":
    main()
