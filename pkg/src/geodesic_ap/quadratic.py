"""Discriminants, Pell solutions, class numbers and regulators of indefinite forms.

Here ``h(d)`` counts SL2(Z)-classes of primitive forms of discriminant ``d``
and ``eps_d = (t_d + u_d sqrt d)/2`` is the smallest unit with
``t_d**2 - d u_d**2 = 4``, so ``h(d) log eps_d = sqrt(d) L(1, chi_d)``.
"""

from __future__ import annotations

import logging
import math
import os
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .arith import Factorization, factorize

log = logging.getLogger(__name__)


class NotADiscriminant(ValueError):
    pass


class CacheError(Exception):
    """Problem reading or writing the class-record cache."""


class CacheFormatError(CacheError):
    pass


# ---------------------------------------------------------------- discriminants


def is_discriminant(d: int) -> bool:
    """Positive, non-square and congruent to 0 or 1 modulo 4."""
    return d > 0 and d % 4 in (0, 1) and math.isqrt(d) ** 2 != d


def is_fundamental(D: int) -> bool:
    if D % 4 == 1:
        m = D
    elif D % 4 == 0 and (D // 4) % 4 in (2, 3):
        m = D // 4
    else:
        return False
    return all(e == 1 for _, e in factorize(abs(m)).factors)


@dataclass(frozen=True)
class Discriminant:
    delta: int
    D: int
    l: int

    def __post_init__(self):
        if self.D * self.l**2 != self.delta:
            raise ValueError(f"{self.D} * {self.l}^2 != {self.delta}")

    def __int__(self):
        return self.delta


def _from_factorization(delta: int, fac: Factorization) -> Discriminant:
    m = f = 1
    for p, e in fac.factors:
        f *= p ** (e // 2)
        if e % 2:
            m *= p
    if m % 4 == 1:
        return Discriminant(delta, m, f)
    # m = 2, 3 (mod 4): delta = 4m (f/2)^2 and f is even because delta = 0 (mod 4)
    return Discriminant(delta, 4 * m, f // 2)


def decompose_discriminant(delta: int) -> Discriminant:
    """Split delta = D l**2 with D a fundamental discriminant."""
    if isinstance(delta, Discriminant):
        return delta
    delta = int(delta)
    if not is_discriminant(delta):
        raise NotADiscriminant(f"{delta} is not a positive non-square discriminant")
    return _from_factorization(delta, factorize(delta))


def _merge(f1: Factorization, f2: Factorization, n: int) -> Factorization:
    exps: dict[int, int] = {}
    for p, e in f1.factors + f2.factors:
        exps[p] = exps.get(p, 0) + e
    return Factorization(n, tuple(sorted(exps.items())))


def trace_discriminant(t: int) -> Discriminant:
    """decompose_discriminant(t*t - 4), factoring (t - 2)(t + 2) instead."""
    if t < 3:
        raise ValueError(f"trace must be >= 3, got {t}")
    delta = t * t - 4
    return _from_factorization(delta, _merge(factorize(t - 2), factorize(t + 2), delta))


def pell_decompositions(t: int) -> list[tuple[int, int]]:
    """All (d, u) with d u**2 = t**2 - 4 and d a discriminant, by increasing u."""
    disc = trace_discriminant(t)
    assert math.isqrt(disc.delta) ** 2 != disc.delta
    us = factorize(disc.l).divisors()
    return [(disc.D * (disc.l // u) ** 2, u) for u in us]


# ---------------------------------------------------------------- Pell / regulator


@dataclass(frozen=True)
class PellSolution:
    d: int
    t: int
    u: int

    def __post_init__(self):
        if self.t * self.t - self.d * self.u * self.u != 4:
            raise ValueError(f"({self.t}, {self.u}) does not solve t^2 - {self.d} u^2 = 4")

    @property
    def log_eps(self) -> float:
        return _log_half_sum(self.t, self.u, self.d)


def _log_half_sum(t: int, u: int, d: int) -> float:
    # log((t + u sqrt d)/2) without overflowing on huge t, u
    shift = max(t.bit_length() - 900, 0)
    if shift:
        t2, u2 = t >> shift, u >> shift
        return math.log((t2 + u2 * math.sqrt(d)) / 2) + shift * math.log(2)
    return math.log((t + u * math.sqrt(d)) / 2)


def _require_disc(d: int) -> int:
    d = int(d)
    if not is_discriminant(d):
        raise NotADiscriminant(f"{d} is not a positive non-square discriminant")
    return d


def pell_fundamental(d: int) -> PellSolution:
    """Fundamental solution of t^2 - d u^2 = 4 from the continued fraction of omega.

    omega = (d mod 2 + sqrt d)/2; a convergent p/q yields (t, u) = (2p - q (d mod 2), q)
    and the first one of norm +-4 is the fundamental unit. Norm -4 gets squared.
    """
    d = _require_disc(d)
    s = math.isqrt(d)
    r = d % 2
    P, Q = r, 2
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    while True:
        a = (P + s) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        t, u = 2 * p - q * r, q
        norm = t * t - d * u * u
        if norm == 4:
            return PellSolution(d, t, u)
        if norm == -4:
            return PellSolution(d, (t * t + d * u * u) // 2, t * u)
        P = a * Q - P
        Q = (d - P * P) // Q


def pell_bruteforce(d: int) -> PellSolution:
    """Smallest u >= 1 with 4 + d u^2 a perfect square."""
    d = _require_disc(d)
    u = 1
    while True:
        sq = 4 + d * u * u
        t = math.isqrt(sq)
        if t * t == sq:
            return PellSolution(d, t, u)
        u += 1


def regulator(d: int) -> float:
    """log eps_d by summing logs of complete quotients over one CF period."""
    return float(_kernels.regulator_kernel(_require_disc(d)))


def regulator_exact(d: int) -> float:
    return pell_fundamental(d).log_eps


# ---------------------------------------------------------------- class numbers

_spf_lock = threading.Lock()
_spf_table = np.zeros(2, dtype=np.uint16)


def smallest_factor_table(n: int) -> np.ndarray:
    """Shared smallest-prime-factor table covering at least [0, n]."""
    global _spf_table
    with _spf_lock:
        if _spf_table.shape[0] <= n:
            size = max(int(n), 1 << 16)
            log.info("building smallest-prime-factor table up to %d", size)
            _spf_table = _kernels.smallest_factor_table(size)
        return _spf_table


def class_number(d: int) -> int:
    """Number of rho-cycles of primitive reduced forms of discriminant d."""
    d = _require_disc(d)
    return int(_kernels.class_number_kernel(d, smallest_factor_table(min(d // 4, 1 << 26))))


def reduced_forms_reference(d: int) -> list[tuple[int, int, int]]:
    d = _require_disc(d)
    sd = math.sqrt(d)
    out = []
    for b in range(1, math.isqrt(d) + 1):
        if (b - d) % 2:
            continue
        n = (d - b * b) // 4
        for a in range(1, n + 1):
            if n % a:
                continue
            if sd - b < 2 * a < sd + b and math.gcd(math.gcd(a, b), n // a) == 1:
                out.append((a, b, -(n // a)))
                out.append((-a, b, n // a))
    return out


def class_number_reference(d: int) -> int:
    """Slow pure-Python cycle count (oracle for the compiled kernel)."""
    forms = reduced_forms_reference(d)
    s = math.isqrt(d)
    index = {(a, b): i for i, (a, b, _) in enumerate(forms)}
    seen = [False] * len(forms)
    cycles = 0
    for start in range(len(forms)):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = True
            _, b, c = forms[j]
            m = 2 * abs(c)
            bp = s - ((s + b) % m)
            j = index[(c, bp)]
    return cycles


# ---------------------------------------------------------------- records + cache


@dataclass(frozen=True)
class ClassRecord:
    d: int
    h: int
    regulator: float

    @property
    def weight(self) -> float:
        """h(d) log eps_d."""
        return self.h * self.regulator

    def to_line(self) -> str:
        return f"{self.d},{self.h},{self.regulator:.15g}"

    @classmethod
    def from_line(cls, line: str) -> "ClassRecord":
        parts = line.strip().split(",")
        try:
            if len(parts) != 3:
                raise ValueError("expected three fields")
            d, h, reg = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise CacheFormatError(f"bad cache line {line!r}: {exc}") from None
        if not is_discriminant(d) or h < 1 or not reg > 0:
            raise CacheFormatError(f"invalid record {line!r}")
        return cls(d, h, reg)


def _rounded(d: int, h: int, reg: float) -> ClassRecord:
    # round-trip through the cache precision so fresh and cached values agree
    return ClassRecord.from_line(f"{d},{h},{reg:.15g}")


class ClassCache:
    """Append-only "d,h,regulator" file plus an in-memory dict.

    ``computed`` counts records computed (not read back) by this instance.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self.records: dict[int, ClassRecord] = {}
        self.computed = 0
        self._pending: list[ClassRecord] = []
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        try:
            text = self.path.read_text()
        except OSError as exc:
            raise CacheError(f"cannot read cache {self.path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            rec = ClassRecord.from_line(line)
            if rec.d in self.records:
                raise CacheFormatError(f"{self.path}:{lineno}: duplicate discriminant {rec.d}")
            self.records[rec.d] = rec

    def __contains__(self, d: int) -> bool:
        return d in self.records

    def __len__(self) -> int:
        return len(self.records)

    def get(self, d: int) -> ClassRecord:
        rec = self.records.get(d)
        if rec is None:
            rec = self.ensure([d])[0]
        return rec

    def ensure(self, ds, workers: int = 1) -> list[ClassRecord]:
        """Records for every d in ds, computing the missing ones in one batch."""
        ds = [int(d) for d in ds]
        missing = sorted({d for d in ds if d not in self.records})
        if missing:
            for d in missing:
                _require_disc(d)
            hs, regs = compute_class_data(missing, workers=workers)
            for d, h, reg in zip(missing, hs, regs):
                rec = _rounded(d, int(h), float(reg))
                self.records[d] = rec
                self._pending.append(rec)
            self.computed += len(missing)
            self.flush()
        return [self.records[d] for d in ds]

    def flush(self):
        if self.path is None or not self._pending:
            self._pending.clear()
            return
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a") as fh:
                for rec in self._pending:
                    fh.write(rec.to_line() + "\n")
        except OSError as exc:
            raise CacheError(f"cannot write cache {self.path}: {exc}") from exc
        self._pending.clear()


def _set_threads(workers: int):
    import numba

    numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))


def compute_class_data(ds, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(h, log eps) arrays for a batch of discriminants; per-d results are
    independent of the thread count."""
    arr = np.asarray(ds, dtype=np.int64)
    if arr.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    spf = smallest_factor_table(int(arr.max()) // 4)
    _set_threads(workers)
    return _kernels.class_data_batch(arr, spf)


_default_cache = ClassCache()


def class_record(d: int, cache: ClassCache | None = None) -> ClassRecord:
    return (cache or _default_cache).get(int(d))
