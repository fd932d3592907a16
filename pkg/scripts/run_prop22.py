"""Short-interval Psi* against its smoothed proxy over a range of x, u = x."""

import argparse

from geodesic_ap.experiments import prop22_check
from geodesic_ap.geodesics import TraceTable
from geodesic_ap.quadratic import ClassCache


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--cache", default=None)
    ap.add_argument("--x-max-exp", type=int, default=6)
    args = ap.parse_args()

    table = TraceTable(ClassCache(args.cache))
    print("x,r,V,direct_rel,smoothed_rel")
    for k in range(3, args.x_max_exp + 1):
        x = 10.0**k
        for r in range(args.p**args.n):
            res = prop22_check(x, x, args.p, args.n, r, route="class", table=table)
            print(f"{x:.0e},{r},{res.V:.1f},{res.direct_rel:+.5f},{res.smoothed_rel:+.5f}")


if __name__ == "__main__":
    main()
