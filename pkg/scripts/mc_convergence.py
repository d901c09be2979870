"""Total-variation distance between Monte Carlo and the master equation.

The distance should fall roughly like 1/sqrt(n_traj). Pass ``--workers`` to
spread trajectories over processes; results do not depend on it.

    python3 scripts/mc_convergence.py --sizes 1000,10000,100000
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from bdcharlier.oracle import SimConfig, master_integrate, mc_simulate
from bdcharlier.rates import Constant, RateProfile


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--n0", type=int, default=3)
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    prof = RateProfile(Constant(args.lam), Constant(args.mu), max(args.t, 1.0))
    exact = master_integrate(prof, args.n0, args.t).probs
    print("n_traj,tv_distance,tv_times_sqrt_n,seconds")
    for size in (int(v) for v in args.sizes.split(",")):
        start = time.perf_counter()
        res = mc_simulate(prof, args.n0, args.t, SimConfig(size, args.seed, workers=args.workers))
        elapsed = time.perf_counter() - start
        k = max(exact.size, res.dist.probs.size)
        emp, ref = np.zeros(k), np.zeros(k)
        emp[: res.dist.probs.size] = res.dist.probs
        ref[: exact.size] = exact
        tv = 0.5 * float(np.abs(emp - ref).sum())
        print(f"{size},{tv:.4e},{tv * np.sqrt(size):.3f},{elapsed:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
