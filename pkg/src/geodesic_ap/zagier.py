"""Zagier's L-series L(s, delta) = sum_{d u^2 = delta} L(s, chi_d) u^(1-2s).

Coefficients lambda_q(delta) are integers and come from two independent routes:
the local Euler factors (``lambda_q_euler``) and the Kloosterman-sum formula
for delta = t^2 - 4 (``lambda_q_expsum``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .arith import factorize, kloosterman_square_row, kronecker, valuation
from .quadratic import Discriminant, decompose_discriminant, is_fundamental

EXPSUM_TOL = 1e-5
SMOOTHING_CUTOFF = 1e-12


class RoundingFailure(ArithmeticError):
    """A floating-point sum that should be an integer is not close to one."""


@dataclass(frozen=True)
class LocalFactorSpec:
    prime: int
    v: int
    chi: int


def local_spec(delta, p: int) -> LocalFactorSpec:
    """(v_p(l), chi_D(p)) for delta = D l^2.

    Integers are read off from the p-adic expansion of delta, so delta itself is
    never factored.
    """
    if isinstance(delta, Discriminant):
        return LocalFactorSpec(p, valuation(p, delta.l), kronecker(delta.D, p))
    delta = int(delta)
    e = valuation(p, delta)
    w = delta // p**e
    if p != 2:
        if e % 2:
            return LocalFactorSpec(p, e // 2, 0)
        return LocalFactorSpec(p, e // 2, kronecker(w, p))
    if e % 2:
        # D = 4m with m = 2 (mod 4), so v_2(D) = 3
        return LocalFactorSpec(2, (e - 3) // 2, 0)
    if w % 4 == 1:
        return LocalFactorSpec(2, e // 2, 1 if w % 8 == 1 else -1)
    return LocalFactorSpec(2, e // 2 - 1, 0)


def lambda_local(spec: LocalFactorSpec, m: int) -> int:
    """Coefficient of p^(-ms) in the local factor at p.

    The factor is sum_{j<v} p^(j(1-2s)) + p^(v(1-2s)) / (1 - chi p^(-s)).
    """
    p, v, chi = spec.prime, spec.v, spec.chi
    if m < 2 * v:
        return p ** (m // 2) if m % 2 == 0 else 0
    return p**v * chi ** (m - 2 * v)


@lru_cache(maxsize=4096)
def _factors(q: int):
    return factorize(q).factors


def lambda_q_euler(q: int, delta) -> int:
    """lambda_q(delta) as a product of local coefficients (multiplicativity)."""
    if q < 1:
        raise ValueError("q must be positive")
    out = 1
    for p, m in _factors(int(q)):
        out *= lambda_local(local_spec(delta, p), m)
        if out == 0:
            break
    return out


def _expsum_values(q: int, ts: np.ndarray) -> np.ndarray:
    total = np.zeros(ts.shape[0], dtype=np.float64)
    q1 = 1
    while q1 * q1 <= q:
        if q % (q1 * q1) == 0:
            q2 = q // (q1 * q1)
            row = kloosterman_square_row(q2)
            k = np.arange(q2)
            phases = np.exp(2j * np.pi * np.outer(ts % q2, k) / q2)
            total += (phases @ row).real / q2
        q1 += 1
    return total


def lambda_q_expsum_many(q: int, ts) -> np.ndarray:
    """lambda_q(t^2 - 4) for an array of traces via exponential sums."""
    ts = np.asarray(ts, dtype=np.int64)
    if q < 1 or np.any(ts < 3):
        raise ValueError("need q >= 1 and t >= 3")
    vals = _expsum_values(int(q), ts)
    rounded = np.rint(vals)
    bad = np.abs(vals - rounded) > EXPSUM_TOL
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise RoundingFailure(f"lambda_{q}({int(ts[i])}^2-4) ~ {vals[i]!r} is not an integer")
    return rounded.astype(np.int64)


def lambda_q_expsum(q: int, t: int) -> int:
    """lambda_q(t^2 - 4) = sum_{q1^2 q2 = q} q2^-1 sum_k e(kt/q2) S(k^2, 1; q2)."""
    return int(lambda_q_expsum_many(q, [t])[0])


# ------------------------------------------------------------------ values at s = 1


@lru_cache(maxsize=8192)
def L1_fundamental(D: int) -> float:
    """L(1, chi_D) for a fundamental D > 1 by the finite log-sine formula."""
    D = int(D)
    if D <= 1 or not is_fundamental(D):
        raise ValueError(f"{D} is not a positive fundamental discriminant")
    return -_kernels.log_sin_sum(D) / math.sqrt(D)


def L1_chi_delta(delta) -> float:
    """L(1, chi_delta) for the character induced from chi_D to modulus delta."""
    disc = decompose_discriminant(delta)
    val = L1_fundamental(disc.D)
    for p, _ in factorize(disc.l).factors:
        val *= 1 - kronecker(disc.D, p) / p
    return val


def L1_zagier(delta) -> float:
    """L(1, delta) = sum over u | l of L(1, chi_{delta/u^2}) / u."""
    disc = decompose_discriminant(delta)
    terms = []
    for u in factorize(disc.l).divisors():
        sub = Discriminant(disc.delta // (u * u), disc.D, disc.l // u)
        terms.append(L1_chi_delta(sub) / u)
    return math.fsum(terms)


def euler_factor_at_p(delta, p: int, s_value: float = 1.0) -> float:
    """Local factor of L(s, delta) at the prime p, at real s."""
    spec = local_spec(delta, p)
    x = float(p) ** (1 - 2 * s_value)
    denom = 1 - spec.chi * float(p) ** (-s_value)
    if denom == 0:
        raise ZeroDivisionError(f"local factor at {p} has a pole at s = {s_value}")
    head = math.fsum(x**m for m in range(spec.v))
    return head + x**spec.v / denom


def Lp1_zagier(delta, p: int) -> float:
    """L^p(1, delta): L(1, delta) with its Euler factor at p removed."""
    return L1_zagier(delta) / euler_factor_at_p(delta, p, 1.0)


# ------------------------------------------------------------------ smoothed sums


def lambda_coefficients(delta, Q: int) -> np.ndarray:
    """lambda_q(delta) for q = 0..Q (entry 0 unused), built multiplicatively."""
    lam = np.zeros(Q + 1, dtype=np.int64)
    if Q < 1:
        return lam
    lam[1] = 1
    spf = _kernels.smallest_factor_table(max(Q, 2))
    local: dict[int, list[int]] = {}
    for n in range(2, Q + 1):
        p = int(spf[n]) or n
        m, r = 0, n
        while r % p == 0:
            r //= p
            m += 1
        loc = local.get(p)
        if loc is None:
            spec = local_spec(delta, p)
            loc = local[p] = [lambda_local(spec, k) for k in range(int(math.log(Q, p)) + 2)]
        # lambda_n = lambda_{n / p^m} * (local coefficient at p^m)
        lam[n] = lam[r] * loc[m]
    return lam


def lambda_V_p(delta, p: int, V: float) -> float:
    """sum_{(q,p)=1} lambda_q(delta)/q * exp(-q/V), truncated where exp(-q/V) < 1e-12.

    Summation runs over increasing q, so the result is reproducible bit for bit.
    """
    if V < 1:
        raise ValueError("V must be >= 1")
    qmax = int(math.ceil(V * -math.log(SMOOTHING_CUTOFF)))
    lam = lambda_coefficients(delta, qmax)
    q = np.arange(qmax + 1)
    keep = (q >= 1) & (q % p != 0) & (lam != 0)
    terms = lam[keep] / q[keep] * np.exp(-q[keep] / V)
    return math.fsum(terms.tolist())
