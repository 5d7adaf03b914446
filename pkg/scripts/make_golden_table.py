#!/usr/bin/env python3
"""Regenerate the golden classification table (tests/golden/classification_table.csv).

The table pins verdict, certificate and numeric evidence for twelve
(curve class, eps, mu) rows; the acceptance suite reproduces it byte for byte.
"""

import argparse
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from diracshell.classify import CurveClass, classify  # noqa: E402
from diracshell.kernels import Coupling  # noqa: E402

SQUARE_ANGLES = (0.5, 0.5, 0.5, 0.5)
LSHAPE_ANGLES = (0.5, 0.5, 0.5, 1.5, 0.5, 0.5)
SHARP_ANGLES = (0.2,)

ROWS = [
    ("lipschitz", (), 1.0, 1.0),
    ("lipschitz", (), 1.0, 2.0),
    ("lipschitz", (), 2.0, 0.0),
    ("c1", (), 1.0, 0.0),
    ("c1", (), 2.0, 0.0),
    ("c1", (), 0.0, 0.0),
    ("polygon", SQUARE_ANGLES, 3.0, 0.0),
    ("polygon", SQUARE_ANGLES, 2.0, 0.0),
    ("polygon", SQUARE_ANGLES, 1.0, 0.0),
    ("polygon", LSHAPE_ANGLES, 1.9, 0.0),
    ("polygon", SHARP_ANGLES, 2.5, 0.0),
    ("polygon", SHARP_ANGLES, 2.0, 0.0),
]


def _fmt(x):
    return "%.17g" % float(x)


def build_table() -> str:
    lines = ["curve_class,angles_pi,eps,mu,verdict,certificate,strength,"
             "threshold_lower,threshold_upper,corollaries"]
    for kind, angles_pi, eps, mu in ROWS:
        if kind == "polygon":
            cls = CurveClass.polygon([a * math.pi for a in angles_pi])
        elif kind == "c1":
            cls = CurveClass.c1()
        else:
            cls = CurveClass.lipschitz()
        res = classify(cls, Coupling(eps, mu))
        ev = res.evidence
        lo = ev.get("threshold_lower", ev.get("threshold", float("nan")))
        hi = ev.get("threshold_upper", ev.get("threshold", float("nan")))
        lines.append(",".join([
            kind,
            ";".join(_fmt(a) for a in angles_pi),
            _fmt(eps), _fmt(mu),
            res.verdict,
            res.certificate or "",
            _fmt(ev["strength"]),
            _fmt(lo) if lo == lo else "",
            _fmt(hi) if hi == hi else "",
            ";".join(ev.get("corollaries", [])),
        ]))
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    default_out = os.path.join(os.path.dirname(__file__), "..", "tests", "golden",
                               "classification_table.csv")
    ap.add_argument("--out", default=default_out)
    args = ap.parse_args()
    text = build_table()
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {args.out} ({len(text.splitlines()) - 1} rows)")


if __name__ == "__main__":
    main()
