"""The ten acceptance criteria, one test each, at their stated tolerances."""

import math
from fractions import Fraction

import numpy as np

from geodesic_ap.arith import is_prime
from geodesic_ap.cli import main
from geodesic_ap.experiments import census, density_table, prop21_check
from geodesic_ap.geodesics import (
    c_p,
    predicted_density,
    predicted_piece_coefficient,
    psi_ap,
    psi_ap_zagier,
    psi_piece,
)
from geodesic_ap.quadratic import compute_class_data, is_discriminant
from geodesic_ap.zagier import L1_chi_delta, lambda_q_euler, lambda_q_expsum_many

PRIMES = (3, 5, 7)


def test_c01_expsum_equals_euler(criterion):
    ts = np.arange(3, 201)
    bad = 0
    for q in range(1, 301):
        exp = lambda_q_expsum_many(q, ts).tolist()
        bad += sum(e != lambda_q_euler(q, t * t - 4) for t, e in zip(ts.tolist(), exp))
    criterion(1, bad == 0, f"lambda_q expsum vs Euler, t<=200, q<=300: {bad} mismatches")


def test_c02_class_number_formula(criterion):
    ds = [d for d in range(5, 5001) if is_discriminant(d)]
    hs, regs = compute_class_data(ds)
    worst = 0.0
    for d, h, reg in zip(ds, hs.tolist(), regs.tolist()):
        rhs = math.sqrt(d) * L1_chi_delta(d)
        worst = max(worst, abs(h * reg - rhs) / rhs)
    criterion(2, worst <= 1e-6, f"h(d) log eps_d vs sqrt(d) L(1, chi_d), {len(ds)} d <= 5000: max rel {worst:.2e}")


def test_c03_dual_route(criterion, small_table):
    worst = 0.0
    for x in (1e3, 1e4, 1e5):
        for p in PRIMES:
            for a in range(p):
                c = psi_ap(x, p, a, small_table)
                z = psi_ap_zagier(x, p, a)
                worst = max(worst, abs(c - z) / c)
    criterion(3, worst <= 1e-6, f"psi_ap class vs Zagier route, x<=1e5, p in 3,5,7: max rel {worst:.2e}")


def test_c04_densities_at_1e8(criterion, big_table):
    worst, improving, cells = 0.0, 0, 0
    for p in PRIMES:
        for a in range(p):
            dens = float(predicted_density(p, a).density)
            dev6 = abs(psi_ap(1e6, p, a, big_table) / 1e6 - dens) / dens
            dev8 = abs(psi_ap(1e8, p, a, big_table) / 1e8 - dens) / dens
            worst = max(worst, dev8)
            improving += dev8 < dev6
            cells += 1
    ok = worst <= 0.10 and improving >= 0.8 * cells
    criterion(4, ok, f"max rel dev at 1e8 {worst:.4f}; {improving}/{cells} cells improve from 1e6")


def test_c05_aggregates_at_1e8(criterion, big_table):
    worst, rows = 0.0, 0
    for p in PRIMES:
        for r in density_table([1e8], p, big_table):
            if r.a is None:
                worst = max(worst, r.rel_dev)
                rows += 1
    criterion(5, rows == 8 and worst <= 0.10, f"{rows} aggregate rows at 1e8, max rel dev {worst:.4f}")


def test_c06_prop21(criterion):
    coprime = [q for q in range(1, 101) if q % 5]
    qs = [coprime[i] for i in np.linspace(0, len(coprime) - 1, 30).round().astype(int)]
    worst = 0.0
    for r in (0, 1):
        for q in qs:
            res = prop21_check(5, 1, r, q, 1e5)
            worst = max(worst, abs(res.deviation) / (20 * q**0.6))
    criterion(6, len(set(qs)) == 30 and worst <= 1, f"30 q <= 100, r in 0,1: max |dev|/(20 q^0.6) = {worst:.3f}")


def test_c07_piece_constants(criterion, big_table):
    worst = Fraction(0)
    for p in (3, 5, 7, 11):
        total = sum(
            (predicted_piece_coefficient(p, n, "odd") + predicted_piece_coefficient(p, n, "even")
             for n in range(1, 41)),
            Fraction(0),
        )
        worst = max(worst, abs(total - c_p(p)))
    piece = psi_piece(1e8, 3, 2, 1, table=big_table) / 1e8
    rel = abs(piece - 2 / 9) / (2 / 9)
    ok = worst <= Fraction(1, 10**12) and rel <= 0.15
    criterion(7, ok, f"sum_(n<=40) coefficients vs p/(p^2-1): {float(worst):.1e}; piece(1e8;3,2;1)/x rel dev {rel:.4f}")


def test_c08_census(criterion):
    primes = [p for p in range(3, 500) if is_prime(p)]
    bad = [p for p in primes
           if (lambda c: (c.count_plus, c.count_minus, c.count_zero))(census(p)) != ((p - 3) // 2, (p - 1) // 2, 2)]
    criterion(8, not bad, f"census for {len(primes)} primes 3..499: {len(bad)} mismatches")


def test_c09_normalization(criterion):
    primes = [p for p in range(3, 98) if is_prime(p)]
    bad = [p for p in primes if sum((predicted_density(p, a).density for a in range(p)), Fraction(0)) != 1]
    criterion(9, not bad, f"sum_a density = 1 exactly for {len(primes)} primes 3..97: {len(bad)} failures")


def test_c10_workers_determinism(criterion, tmp_path):
    blobs = []
    for k in (1, 8):
        out = tmp_path / f"workers{k}.csv"
        code = main(["verify-theorem", "--p", "5", "--x-list", "1e6,1e7,1e8", "--workers", str(k),
                     "--cache", str(tmp_path / f"cache{k}.csv"), "--output", str(out)])
        assert code == 0
        blobs.append(out.read_bytes())
    criterion(10, blobs[0] == blobs[1], f"verify-theorem CSV, workers 1 vs 8, fresh caches: identical={blobs[0] == blobs[1]}")
