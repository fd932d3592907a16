"""Compiled inner loops for bulk class-number and regulator computation.

Every kernel here has a slow pure-Python counterpart in ``quadratic`` that the
test suite checks it against.
"""

import math

import numpy as np
from numba import config, njit, prange

# the bundled TBB is too old for numba and only produces a warning
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

MAX_DIVISORS = 8192


@njit(cache=True)
def isqrt64(n):
    r = np.int64(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def gcd64(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def smallest_factor_table(n):
    """spf[m] = smallest prime factor of m for composite m, 0 for primes/0/1.

    Composite m <= n has spf <= sqrt(n), so uint16 suffices up to 2**32.
    """
    spf = np.zeros(n + 1, dtype=np.uint16)
    r = isqrt64(n)
    for p in range(2, r + 1):
        if spf[p] == 0:
            for m in range(p * p, n + 1, p):
                if spf[m] == 0:
                    spf[m] = p
    return spf


@njit(cache=True)
def _factor(n, spf, primes, exps):
    """Fill primes/exps with the factorization of n; return the count."""
    k = 0
    limit = spf.shape[0]
    while n > 1:
        if n < limit:
            p = np.int64(spf[n])
            if p == 0:
                p = n
        else:
            p = n
            q = np.int64(2)
            while q * q <= n:
                if n % q == 0:
                    p = q
                    break
                q += 1
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        primes[k] = p
        exps[k] = e
        k += 1
    return k


@njit(cache=True)
def _divisors(n, spf, primes, exps, out):
    k = _factor(n, spf, primes, exps)
    cnt = 1
    out[0] = 1
    for i in range(k):
        p = primes[i]
        base = cnt
        pk = np.int64(1)
        for _ in range(exps[i]):
            pk *= p
            for j in range(base):
                out[cnt] = out[j] * pk
                cnt += 1
    return cnt


@njit(cache=True)
def reduced_forms(d, spf):
    """All primitive reduced forms (a, b) of discriminant d, both signs of a.

    Reduced means 0 < b < sqrt(d) and sqrt(d) - b < 2|a| < sqrt(d) + b.
    """
    s = isqrt64(d)
    cap = 1024
    fa = np.empty(cap, dtype=np.int64)
    fb = np.empty(cap, dtype=np.int64)
    n_forms = 0
    primes = np.empty(64, dtype=np.int64)
    exps = np.empty(64, dtype=np.int64)
    divs = np.empty(MAX_DIVISORS, dtype=np.int64)
    b = d % 2
    if b == 0:
        b = 2
    while b <= s:
        n = (d - b * b) // 4
        nd = _divisors(n, spf, primes, exps, divs)
        for i in range(nd):
            a = divs[i]
            lo = 2 * a + b
            hi = 2 * a - b
            if lo * lo <= d:
                continue
            if hi > 0 and hi * hi >= d:
                continue
            if gcd64(gcd64(a, b), n // a) != 1:
                continue
            if n_forms + 2 > cap:
                cap *= 2
                na = np.empty(cap, dtype=np.int64)
                nb = np.empty(cap, dtype=np.int64)
                na[:n_forms] = fa[:n_forms]
                nb[:n_forms] = fb[:n_forms]
                fa = na
                fb = nb
            fa[n_forms] = a
            fb[n_forms] = b
            fa[n_forms + 1] = -a
            fb[n_forms + 1] = b
            n_forms += 2
        b += 2
    return fa[:n_forms], fb[:n_forms]


@njit(cache=True)
def rho(d, s, a, b):
    """One reduction step (a, b, c) -> (c, b', c') on a reduced form; returns (c, b')."""
    c = (b * b - d) // (4 * a)
    m = 2 * abs(c)
    # largest b' <= floor(sqrt d) with b' = -b (mod 2|c|)
    r = (-b) % m
    bp = s - ((s - r) % m)
    return c, bp


@njit(cache=True)
def count_cycles(d, fa, fb):
    n = fa.shape[0]
    if n == 0:
        return 0
    s = isqrt64(d)
    width = 2 * s + 3
    keys = (fa + s + 1) * width + fb
    order = np.argsort(keys)
    skeys = keys[order]
    seen = np.zeros(n, dtype=np.bool_)
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = True
            c, bp = rho(d, s, fa[j], fb[j])
            key = (c + s + 1) * width + bp
            pos = np.searchsorted(skeys, key)
            if pos >= n or skeys[pos] != key:
                raise ValueError("rho left the set of reduced forms")
            j = order[pos]
    return cycles


@njit(cache=True)
def class_number_kernel(d, spf):
    fa, fb = reduced_forms(d, spf)
    return count_cycles(d, fa, fb)


@njit(cache=True)
def regulator_kernel(d):
    """log of the norm +1 fundamental unit (t + u sqrt d)/2 via the CF period.

    Expands omega = (d mod 2 + sqrt d)/2 with exact integer state (P, Q); the
    first return Q = 2 closes the period of the unit of either norm.
    """
    s = isqrt64(d)
    rd = math.sqrt(d)
    P = d % 2
    Q = np.int64(2)
    a = (P + s) // Q
    P = a * Q - P
    Q = (d - P * P) // Q
    acc = 0.0
    prod = 1.0
    steps = 0
    while True:
        steps += 1
        prod *= (P + rd) / Q
        if prod > 1e250:
            acc += math.log(prod)
            prod = 1.0
        if Q == 2:
            break
        a = (P + s) // Q
        P = a * Q - P
        Q = (d - P * P) // Q
    acc += math.log(prod)
    if steps % 2 == 1:
        acc *= 2.0
    return acc


@njit(cache=True, parallel=True)
def class_data_batch(ds, spf):
    n = ds.shape[0]
    hs = np.zeros(n, dtype=np.int64)
    regs = np.zeros(n, dtype=np.float64)
    for i in prange(n):
        hs[i] = class_number_kernel(ds[i], spf)
        regs[i] = regulator_kernel(ds[i])
    return hs, regs


@njit(cache=True)
def kronecker_kernel(D, n):
    """Kronecker symbol (D/n) for n >= 1."""
    result = 1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v > 0:
        if D % 2 == 0:
            return 0
        r8 = D % 8
        if v % 2 == 1 and (r8 == 3 or r8 == 5):
            result = -result
    a = D % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r8 = n % 8
            if r8 == 3 or r8 == 5:
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    if n == 1:
        return result
    return 0


@njit(cache=True)
def log_sin_sum(D):
    """Sum over 0 < a < D of kronecker(D, a) * log(sin(pi a / D))."""
    total = 0.0
    comp = 0.0
    for a in range(1, D):
        chi = kronecker_kernel(D, a)
        if chi != 0:
            y = chi * math.log(math.sin(math.pi * a / D)) - comp
            t = total + y
            comp = (t - total) - y
            total = t
    return total
