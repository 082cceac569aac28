"""Conditioning of far-tail equilibria.

When the equilibrium cutoff sits many noise units above the midpoint, the
payoff of risk at p = 1 is nearly equal to the safe payoff and the best
response map c -> BR(c) becomes extremely steep. The product |BR'(c)| * ulp(c)
then bounds from below the residual |BR(c) - c| any double can achieve. This
script draws random instances and prints that floor next to the residual
the solver attains.

    python scripts/far_tail_conditioning.py --n 200 --seed 303
"""
import argparse
import math

import numpy as np

from careercutoff import Primitives, best_response_cutoff, posteriors_of_cutoff, solve_equilibrium


def draw(rng):
    sl = rng.uniform(0.5, 2.0)
    lmin = rng.uniform(0.0, 0.5)
    mu0 = rng.uniform(-1, 1)
    return Primitives(pi=rng.uniform(0.1, 0.9), mu0=mu0, mu1=mu0 + rng.uniform(0.5, 2.0), sigma_l=sl,
                      sigma_h=sl * rng.uniform(0.3, 0.95), theta=rng.uniform(0.5, 2.0), kappa=rng.uniform(0.5, 2.0),
                      b=rng.uniform(0.0, 1.0), t_gate=rng.uniform(0.0, 1.0), lambda_min=lmin,
                      lambda_max=rng.uniform(lmin, 1.0))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=303)
    a = ap.parse_args(argv)
    rng = np.random.default_rng(a.seed)
    print(f"{'i':>4} {'cutoff':>10} {'(c-mid)/sl':>10} {'residual':>10} {'floor':>10}")
    for i in range(a.n):
        p = draw(rng)
        rho = float(rng.uniform(0.05, 0.95))
        eq = solve_equilibrium(rho, p)
        if not eq.interior or eq.residual <= 1e-8:
            continue
        c = eq.cutoff
        br = [best_response_cutoff(rho, posteriors_of_cutoff(x, rho, p), p)
              for x in (math.nextafter(c, -math.inf), c, math.nextafter(c, math.inf))]
        # BR moves by this much across one ulp of c, so no double does better
        floor = max(abs(br[2] - br[1]), abs(br[1] - br[0]))
        print(f"{i:>4} {c:>10.4f} {(c - p.midpoint) / p.sigma_l:>10.2f} {eq.residual:>10.2e} {floor:>10.2e}")


if __name__ == "__main__":
    main()
