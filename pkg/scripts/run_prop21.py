"""Deviation of sum_{t = r (p^n), t <= X} lambda_q(t^2 - 4) from (X/p^n) mu(b)/b,
with the empirical constant C = max |dev| / q^(1/2)."""

import argparse
import math

from geodesic_ap.experiments import prop21_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--X", type=float, default=1e5)
    ap.add_argument("--q-max", type=int, default=100)
    args = ap.parse_args()

    worst = 0.0
    print("r,q,lhs,main,deviation,dev_over_sqrt_q")
    for r in range(args.p**args.n):
        for q in range(1, args.q_max + 1):
            if math.gcd(q, args.p) != 1:
                continue
            res = prop21_check(args.p, args.n, r, q, args.X)
            ratio = abs(res.deviation) / math.sqrt(q)
            worst = max(worst, ratio)
            print(f"{r},{q},{res.lhs},{res.main:.6g},{res.deviation:.6g},{ratio:.4f}")
    print(f"# empirical C in |dev| <= C q^(1/2): {worst:.3f}")


if __name__ == "__main__":
    main()
