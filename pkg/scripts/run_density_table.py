"""Density table for p = 3, 5, 7 over x = 1e5 .. 1e8, with exponent fits.

    python3 scripts/run_density_table.py --cache records.csv --out results/
"""

import argparse
from pathlib import Path

from geodesic_ap.experiments import density_table, emit_loglog, error_exponent_fit
from geodesic_ap.geodesics import TraceTable
from geodesic_ap.quadratic import ClassCache


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cache", default=None)
    ap.add_argument("--out", default="results")
    ap.add_argument("--primes", default="3,5,7")
    ap.add_argument("--x-max-exp", type=int, default=8)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    xs = [10.0**k for k in range(5, args.x_max_exp + 1)]
    table = TraceTable(ClassCache(args.cache))
    for p in map(int, args.primes.split(",")):
        reports = density_table(xs, p, table, output=out / f"density_p{p}.csv")
        emit_loglog(reports, out / f"loglog_p{p}.dat")
        for a in range(p):
            fit = error_exponent_fit([r for r in reports if r.a == a])
            last = next(r for r in reports if r.a == a and r.x == xs[-1])
            slope = "n/a" if fit is None else f"{fit.slope:.3f}"
            print(f"p={p} a={a} symbol={last.symbol:+d} rel_dev(x={xs[-1]:.0e})={last.rel_dev:.5f} slope={slope}")


if __name__ == "__main__":
    main()
