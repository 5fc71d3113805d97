"""Sweep alpha_1 of (alpha_1, 3, -2, -5, 1.5) and report where real negative eigenvalues occur.

Writes the full locus as CSV (same columns as ``phasespec locus``) and prints
a short summary.  Negative real eigenvalues only show up when alpha_1 cancels
one of the other parameters; in between they come as conjugate pairs.

    python scripts/locus_sweep.py --out locus.csv
"""
import argparse
import csv
import io
import time
from collections import defaultdict

from phasespec.cli import Command, Output, RunConfig, Sweep, run

OTHERS = ("3", "-2", "-5", "1.5")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--from", dest="start", type=float, default=-200.0)
    ap.add_argument("--to", dest="stop", type=float, default=200.0)
    ap.add_argument("--steps", type=int, default=401)
    ap.add_argument("--out", help="CSV destination (default: summary only)")
    args = ap.parse_args()

    cfg = RunConfig(Command.LOCUS, params=("X",) + OTHERS, output=Output.CSV,
                    sweep=Sweep(0, args.start, args.stop, args.steps))
    buf, err = io.StringIO(), io.StringIO()
    t0 = time.perf_counter()
    if run(cfg, buf, err) != 0:
        raise SystemExit(err.getvalue())
    elapsed = time.perf_counter() - t0

    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())

    alphas = {float(r["alpha"]) for r in rows}
    negative = defaultdict(list)
    worst = 0.0
    for r in rows:
        worst = max(worst, float(r["residual"]))
        if float(r["im"]) == 0.0 and float(r["re"]) < 0.0:
            negative[float(r["alpha"])].append((float(r["re"]), int(r["mult"])))

    print(f"{len(alphas)} grid points, {len(rows)} rows, {elapsed:.2f} s, max residual {worst:.1e}")
    print("negative real eigenvalues:")
    for alpha in sorted(negative):
        for value, mult in negative[alpha]:
            expected = (1 - alpha * alpha) / 4
            print(f"  alpha_1 = {alpha:+7.3f}: {value:+.12f} (mult {mult}), (1 - a^2)/4 = {expected:+.12f}")


if __name__ == "__main__":
    main()
