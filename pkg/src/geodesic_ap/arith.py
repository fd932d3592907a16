"""Exact integer and character primitives."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PRIME_TABLE_LIMIT = 10**6


@lru_cache(maxsize=None)
def primes_upto(n: int) -> np.ndarray:
    """Primes <= n by an Eratosthenes sieve (int64 array)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in primes_upto(PRIME_TABLE_LIMIT))


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.factors}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors do not multiply to {self.n}")

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def factorize(n: int) -> Factorization:
    """Trial division, first over the cached prime table, then odd candidates."""
    n = int(n)
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    m = n
    out = []
    for p in _small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    else:
        # exhausted the table; continue with odd trial divisors
        p = PRIME_TABLE_LIMIT + 1
        while p * p <= m:
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                out.append((p, e))
            p += 2
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = factorize(n).factors
    return len(f) == 1 and f[0][1] == 1


def mobius(n: int) -> int:
    f = factorize(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n).factors)


def valuation(p: int, n: int) -> int:
    """Exponent of the prime p in the nonzero integer n."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def squarefree_decompose(q: int) -> tuple[int, int]:
    """Return (b, c) with q = b*c**2 and b squarefree."""
    b = c = 1
    for p, e in factorize(q).factors:
        c *= p ** (e // 2)
        if e % 2:
            b *= p
    return b, c


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for arbitrary integers."""
    D, n = int(D), int(n)
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D/n) with n odd positive
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def mod_inverse(x: int, c: int) -> int:
    if math.gcd(x, c) != 1:
        raise ValueError(f"{x} is not invertible modulo {c}")
    return pow(x, -1, c) if c > 1 else 0


def kloosterman(m: int, n: int, c: int) -> float:
    """S(m, n; c) by direct summation over units modulo c."""
    if c < 1:
        raise ValueError("modulus must be positive")
    total = 0j
    for x in range(c):
        if math.gcd(x, c) == 1:
            xbar = mod_inverse(x, c)
            total += cmath.exp(2j * math.pi * ((m * x + n * xbar) % c) / c)
    assert abs(total.imag) < 1e-9, total
    return total.real


@lru_cache(maxsize=512)
def kloosterman_square_row(c: int) -> np.ndarray:
    """Vector of S(k**2, 1; c) for k = 0, ..., c-1 (vectorized direct sum)."""
    units = np.array([x for x in range(c) if math.gcd(x, c) == 1], dtype=np.int64)
    inv = np.array([mod_inverse(int(x), c) for x in units], dtype=np.int64)
    k = np.arange(c, dtype=np.int64)
    phase = ((k * k % c)[:, None] * units[None, :] + inv[None, :]) % c
    vals = np.exp(2j * np.pi * phase / c).sum(axis=1)
    if np.max(np.abs(vals.imag), initial=0.0) > 1e-9:
        raise ArithmeticError(f"non-real Kloosterman sums modulo {c}")
    return vals.real
