"""Timing of the full spectrum for growing n, plus a sweep over parameter spread.

    python scripts/bench_scaling.py --sizes 100,1000,10000,100000

The first table uses all-equal parameters (the ``phasespec bench`` setup).
The second draws n independent positive parameters, which makes every
eigenvalue a separate phase branch on a distinct set of arctangent terms, so
the cost per eigenvalue grows with n there.
"""
import argparse
import time

import numpy as np

from phasespec import solve_spectrum, validate_params


def timed(p):
    t0 = time.perf_counter()
    report = solve_spectrum(p)
    return time.perf_counter() - t0, report.max_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100,1000,10000,100000")
    ap.add_argument("--random-sizes", default="50,100,200,400,800")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    alpha = float(rng.uniform(0.5, 3.0))
    print(f"all-equal alpha = {alpha:.4f}")
    print(f"{'n':>8} {'seconds':>9} {'us/eig':>8} {'max residual':>13}")
    for n in (int(float(s)) for s in args.sizes.split(",")):
        seconds, res = timed(validate_params([alpha] * n))
        print(f"{n:>8} {seconds:>9.3f} {1e6 * seconds / n:>8.1f} {res:>13.1e}")

    print("\nindependent positive parameters in [0.1, 5]")
    print(f"{'n':>8} {'seconds':>9} {'us/eig':>8} {'max residual':>13}")
    for n in (int(s) for s in args.random_sizes.split(",")):
        seconds, res = timed(validate_params(rng.uniform(0.1, 5.0, n)))
        print(f"{n:>8} {seconds:>9.3f} {1e6 * seconds / n:>8.1f} {res:>13.1e}")


if __name__ == "__main__":
    main()
