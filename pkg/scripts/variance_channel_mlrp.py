"""Why the package does not use a pure variance channel for ability.

If ability only changes the noise scale (both types see N(mu_s, sigma_a)),
the ability mixture of the state-conditional densities stops having a
monotone likelihood ratio once the high type carries enough weight: far
from the means the wide low-type component dominates both states again and
p(x) bends back towards the prior. This script scans reputations and
reports where p(x) first fails to be increasing.

    python scripts/variance_channel_mlrp.py --sigma-h 0.5 --sigma-l 1.0
"""
import argparse
import csv
import sys

import numpy as np
from scipy.stats import norm


def p_variance_channel(x, rho, pi, mu0, mu1, sh, sl):
    f1 = rho * norm.pdf(x, mu1, sh) + (1 - rho) * norm.pdf(x, mu1, sl)
    f0 = rho * norm.pdf(x, mu0, sh) + (1 - rho) * norm.pdf(x, mu0, sl)
    return pi * f1 / (pi * f1 + (1 - pi) * f0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pi", type=float, default=0.5)
    ap.add_argument("--mu0", type=float, default=0.0)
    ap.add_argument("--mu1", type=float, default=1.0)
    ap.add_argument("--sigma-h", type=float, default=0.5)
    ap.add_argument("--sigma-l", type=float, default=1.0)
    ap.add_argument("--out", default=None, help="optional CSV path")
    a = ap.parse_args(argv)

    xs = np.linspace(a.mu0 - 12 * a.sigma_l, a.mu1 + 12 * a.sigma_l, 40001)
    rows = []
    first_bad = None
    for rho in np.round(np.arange(0.01, 1.0, 0.01), 2):
        p = p_variance_channel(xs, rho, a.pi, a.mu0, a.mu1, a.sigma_h, a.sigma_l)
        dp = np.diff(p)
        worst = float(dp.min())
        where = float(xs[int(np.argmin(dp))])
        rows.append((rho, worst, where))
        if worst < -1e-12 and first_bad is None:
            first_bad = rho
    w = csv.writer(open(a.out, "w", newline="") if a.out else sys.stdout)
    w.writerow(["rho", "min_step_of_p", "at_x"])
    w.writerows(rows)
    msg = f"p(x) non-monotone from rho = {first_bad}" if first_bad else "p(x) monotone at every rho scanned"
    print(msg, file=sys.stderr)


if __name__ == "__main__":
    main()
