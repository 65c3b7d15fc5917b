#!/usr/bin/env python3
"""Fit the double-exponential reliability exponent against depth.

For each (erasure, rate) pair the k-th best channel at depth n has
reliability exponent L_k(n); its log2 should grow like a*n + b with
a near 1/2 and b near Q^{-1}(R/(1-eps))/2.  This script prints the
fitted line next to that reference for a grid of operating points.
"""

import argparse
import math
import sys

from polarscale.harness import exact_enumerate_bec
from polarscale.numerics import q_inv
from polarscale.scaling import scaling_fit


def threshold_exponents(eps, rate, ns):
    points = []
    for n in ns:
        en = exact_enumerate_bec(eps, n)
        levels = sorted(en.neg_log2_leaves(), reverse=True)
        k = math.ceil(rate * en.size)
        points.append((n, math.log2(levels[k - 1])))
    return points


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ns", default="8,12,16,20",
                        help="comma separated depths (default 8,12,16,20)")
    args = parser.parse_args()
    ns = [int(part) for part in args.ns.split(",")]

    print(f"{'eps':>5} {'rate':>5} {'a':>8} {'b':>8} {'rms':>8} {'ref_a':>6} {'ref_b':>8}")
    for eps in (0.3, 0.5, 0.7):
        for rate in (0.2, 0.3):
            # points at or near capacity have no scaling window at desk depths
            if rate >= (1.0 - eps) - 0.05:
                continue
            fit = scaling_fit(threshold_exponents(eps, rate, ns))
            ref_b = q_inv(rate / (1.0 - eps)) / 2.0
            print(f"{eps:>5.2f} {rate:>5.2f} {fit.a:>8.4f} {fit.b:>8.4f} "
                  f"{fit.rms_residual:>8.4f} {0.5:>6.2f} {ref_b:>8.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
