"""Solve the five-parameter worked example and compare with the printed digits.

    python scripts/reproduce_example.py
"""
import time

import numpy as np

from phasespec import solve_spectrum, validate_params

PARAMS = [5, -0.1, 3, -2, 1.5]
PRINTED = [22.5527, 0.9821, 0.2287, -0.7492 + 0.03131j, -0.7492 - 0.03131j]


def main():
    p = validate_params(PARAMS)
    t0 = time.perf_counter()
    report = solve_spectrum(p)
    elapsed = time.perf_counter() - t0
    got = [e for e in report.eigenvalues for _ in range(e.multiplicity)]
    print(f"alpha = {PARAMS}   ({elapsed * 1e3:.2f} ms)")
    print(f"{'printed':>22}  {'computed':>38}  {'method':<15} residual")
    for want in PRINTED:
        j = int(np.argmin([abs(e.value - want) for e in got]))
        e = got.pop(j)
        print(f"{str(want):>22}  {e.value:>38.15g}  {e.method.value:<15} {e.residual:.1e}")


if __name__ == "__main__":
    main()
