"""Map how far the Charlier spectral sum drifts from the finite sum.

For each profile, time and initial state the script prints the worst
|expr2 - expr1| over m <= m_max next to the rounding estimate carried by the
spectral sum. The spectral sum loses accuracy at short times and large n,
where its terms grow far beyond the probabilities they cancel down to.

    python3 scripts/cross_validate.py --times 0.05,0.2,1,4 --states 5,15,25,35
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from bdcharlier.errors import PrecisionLoss
from bdcharlier.rates import Constant, PiecewiseConstant, RateProfile, Sinusoid
from bdcharlier.transition import expr1_row, expr2_row
from bdcharlier.weinorman import solve

PROFILES = {
    "constant": RateProfile(Constant(1.0), Constant(0.5), 10.0),
    "sin_lambda": RateProfile(Sinusoid(1.0, 0.5, 2 * math.pi), Constant(0.5), 10.0),
    "sin_mu": RateProfile(Constant(1.0), Sinusoid(0.5, 0.5, 1.0), 10.0),
    "piecewise": RateProfile(PiecewiseConstant((0.0, 0.75), (1.0, 2.0)),
                             PiecewiseConstant((0.0, 1.0), (0.5, 1.0)), 10.0),
}


def floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--times", type=floats, default=[0.05, 0.2, 1.0, 4.0])
    ap.add_argument("--states", type=lambda s: [int(v) for v in s.split(",")], default=[5, 15, 25, 35])
    ap.add_argument("--m-max", type=int, default=None, help="defaults to n + 10")
    ap.add_argument("--profiles", default=",".join(PROFILES))
    args = ap.parse_args(argv)

    print("profile,t,n,alpha,x_max,max_abs_diff,rounding_estimate")
    for name in args.profiles.split(","):
        prof = PROFILES[name]
        for t in args.times:
            g = solve(prof, t)
            for n in args.states:
                m_max = args.m_max if args.m_max is not None else n + 10
                ref = expr1_row(n, m_max, g)
                try:
                    row, diag = expr2_row(n, m_max, g)
                except PrecisionLoss:
                    print(f"{name},{t:g},{n},{g.alpha_spectral:.4g},,precision-loss,")
                    continue
                diff = float(np.abs(row - ref).max())
                print(f"{name},{t:g},{n},{diag.alpha:.4g},{diag.x_max},{diff:.3e},{diag.error_estimate:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
