#!/usr/bin/env python3
"""Tabulate the corner supremum function m(theta) and locate the plateau onset.

Writes a CSV of (theta, m(theta)) and prints the largest opening for which
m exceeds the plateau value 1/4, which separates the two threshold regimes.
"""

import argparse
import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from diracshell.corner_symbol import m_of  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="mtheta_table.csv")
    ap.add_argument("--steps", type=int, default=361)
    ap.add_argument("--theta-min-pi", type=float, default=0.01)
    ap.add_argument("--theta-max-pi", type=float, default=0.99)
    args = ap.parse_args()

    grid = np.linspace(args.theta_min_pi, args.theta_max_pi, args.steps) * math.pi
    vals = np.array([m_of(t) for t in grid])
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("theta,theta_over_pi,m_theta\n")
        for t, v in zip(grid, vals):
            fh.write("%.17g,%.17g,%.17g\n" % (t, t / math.pi, v))
    above = grid[vals > 0.25 + 1e-8]
    if above.size:
        print(f"m > 1/4 for theta up to {above.max() / math.pi:.6f} pi")
    print(f"wrote {args.out} ({args.steps} rows)")


if __name__ == "__main__":
    main()
