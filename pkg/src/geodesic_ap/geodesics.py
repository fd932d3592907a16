"""Prime geodesic counting functions for PSL2(Z), split by the trace modulo p.

Every counting function is a sum over traces 3 <= t <= X = sqrt(x) + 1/sqrt(x)
of a per-trace weight:

* class route   2 * sum_{d u^2 = t^2 - 4} h(d) log eps_d
* Zagier route  2 * sqrt(t^2 - 4) * L(1, t^2 - 4)

Sums use ``math.fsum`` over traces in ascending order, so the value does not
depend on how the per-trace weights were computed or scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import is_prime, kronecker, valuation
from .quadratic import ClassCache, pell_decompositions, trace_discriminant
from .zagier import L1_zagier, euler_factor_at_p

ZAGIER_X_CAP = 1e7
DEFAULT_THETA = Fraction(1, 6)


def _check_prime(p: int):
    if p == 2:
        raise ValueError("p = 2 is not covered: the density theorem needs an odd prime")
    if p < 3 or not is_prime(p):
        raise ValueError(f"modulus must be an odd prime, got {p}")


# ---------------------------------------------------------------- trace window


def trace_bound(x) -> int:
    """Largest t with t <= sqrt(x) + 1/sqrt(x), decided in exact rationals.

    t <= sqrt(x) + 1/sqrt(x)  <=>  t^2 x <= (x + 1)^2, which keeps N(P) = x included.
    """
    xq = Fraction(x)
    if xq <= 0:
        raise ValueError("x must be positive")
    bound = (xq + 1) ** 2 / xq
    return math.isqrt(bound.numerator // bound.denominator)


@dataclass(frozen=True)
class TraceWindow:
    x: float
    X: float
    t_min: int
    t_max: int

    @classmethod
    def of(cls, x) -> "TraceWindow":
        r = math.sqrt(x)
        return cls(float(x), r + 1 / r, 3, trace_bound(x))

    @property
    def traces(self) -> range:
        return range(self.t_min, self.t_max + 1)


def norm_of_trace(t: int) -> float:
    """N(P) = ((t + sqrt(t^2 - 4))/2)^2."""
    if t < 3:
        raise ValueError("hyperbolic traces are >= 3")
    return ((t + math.sqrt(t * t - 4)) / 2) ** 2


# ---------------------------------------------------------------- per-trace weights


class TraceTable:
    """Class-route weights w(t) for 3 <= t <= t_max, grown on demand."""

    def __init__(self, cache: ClassCache | None = None, workers: int = 1):
        self.cache = cache if cache is not None else ClassCache()
        self.workers = workers
        self.t_max = 2
        self.weights = np.zeros(3)
        self.decompositions: dict[int, list[tuple[int, int]]] = {}

    def extend(self, t_max: int) -> "TraceTable":
        if t_max <= self.t_max:
            return self
        new = range(self.t_max + 1, t_max + 1)
        for t in new:
            self.decompositions[t] = pell_decompositions(t)
        self.cache.ensure(
            [d for t in new for d, _ in self.decompositions[t]], workers=self.workers
        )
        w = np.zeros(t_max + 1)
        w[: self.t_max + 1] = self.weights
        for t in new:
            recs = [self.cache.records[d] for d, _ in self.decompositions[t]]
            w[t] = 2 * math.fsum(r.weight for r in recs)
        self.weights = w
        self.t_max = t_max
        return self

    def for_x(self, x) -> np.ndarray:
        """Weights indexed by trace, truncated to the window of x."""
        tb = trace_bound(x)
        self.extend(tb)
        return self.weights[: tb + 1]


def zagier_weight(t: int) -> float:
    delta = t * t - 4
    return 2 * math.sqrt(delta) * L1_zagier(trace_discriminant(t))


def zagier_star_weight(t: int, p: int) -> float:
    disc = trace_discriminant(t)
    return 2 * math.sqrt(disc.delta) * L1_zagier(disc) / euler_factor_at_p(disc, p, 1.0)


def _sum(weights: np.ndarray, ts) -> float:
    return math.fsum(weights[np.asarray(ts, dtype=np.int64)].tolist()) if len(ts) else 0.0


_default_table: TraceTable | None = None


def default_table() -> TraceTable:
    global _default_table
    if _default_table is None:
        _default_table = TraceTable()
    return _default_table


# ---------------------------------------------------------------- counting functions


def psi(x, table: TraceTable | None = None) -> float:
    """Psi(x) = sum over hyperbolic classes with N(P) <= x of Lambda(P)."""
    w = (table or default_table()).for_x(x)
    return _sum(w, range(3, w.shape[0]))


def traces_in_class(t_max: int, modulus: int, a: int) -> range:
    first = 3 + (a - 3) % modulus
    return range(first, t_max + 1, modulus)


def psi_ap(x, p: int, a: int, table: TraceTable | None = None) -> float:
    """Psi(x; p, a): traces t = a (mod p) only."""
    _check_prime(p)
    w = (table or default_table()).for_x(x)
    return _sum(w, traces_in_class(w.shape[0] - 1, p, a % p))


def psi_ap_zagier(x, p: int, a: int) -> float:
    """Psi(x; p, a) from 2 sqrt(t^2-4) L(1, t^2-4); policy-capped at x <= 1e7."""
    _check_prime(p)
    if x > ZAGIER_X_CAP:
        raise ValueError(f"Zagier route is capped at x <= {ZAGIER_X_CAP:g}")
    ts = traces_in_class(trace_bound(x), p, a % p)
    return math.fsum(zagier_weight(t) for t in ts)


def psi_star(x, p: int, n: int, r: int, route: str = "zagier", table: TraceTable | None = None) -> float:
    """Psi*(x; p^n, r) = 2 sum_{t = r (p^n)} sqrt(t^2-4) L^p(1, t^2-4)."""
    _check_prime(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    ts = traces_in_class(trace_bound(x), p**n, r % p**n)
    if route == "zagier":
        return math.fsum(zagier_star_weight(t, p) for t in ts)
    if route == "class":
        w = (table or default_table()).for_x(x)
        return math.fsum(w[t] / euler_factor_at_p(t * t - 4, p, 1.0) for t in ts)
    raise ValueError(f"unknown route {route!r}")


def _piece_shift(p: int, a: int) -> int:
    a %= p
    if a == 2 % p:
        return 2
    if a == (-2) % p:
        return -2
    raise ValueError(f"valuation pieces need a = +-2 (mod {p}), got {a}")


def piece_traces(t_max: int, p: int, a: int, k: int) -> list[int]:
    """Traces 3 <= t <= t_max with v_p(t - a) = k, a taken as the representative +-2."""
    shift = _piece_shift(p, a)
    return [t for t in traces_in_class(t_max, p**k, shift) if valuation(p, t - shift) == k]


def psi_piece(x, p: int, a: int, k: int, route: str = "class", table: TraceTable | None = None) -> float:
    """Psi(x; p, a; k): the part of Psi(x; p, +-2) with v_p(t -+ 2) = k."""
    _check_prime(p)
    if k < 1:
        raise ValueError("k must be >= 1")
    ts = piece_traces(trace_bound(x), p, a, k)
    if route == "class":
        w = (table or default_table()).for_x(x)
        return _sum(w, ts)
    if route == "zagier":
        return math.fsum(zagier_weight(t) for t in ts)
    raise ValueError(f"unknown route {route!r}")


# ---------------------------------------------------------------- predictions


@dataclass(frozen=True)
class DensityPrediction:
    p: int
    a: int
    symbol: int
    density: Fraction


def density_for_symbol(p: int, symbol: int) -> Fraction:
    if symbol == 1:
        return Fraction(1, p - 1)
    if symbol == -1:
        return Fraction(1, p + 1)
    return Fraction(p, p * p - 1)


def predicted_density(p: int, a: int) -> DensityPrediction:
    """Main-term density of Psi(x; p, a)/x, by the Legendre symbol of a^2 - 4."""
    _check_prime(p)
    a %= p
    symbol = kronecker(a * a - 4, p)
    return DensityPrediction(p, a, symbol, density_for_symbol(p, symbol))


def aggregate_density(p: int, symbol: int) -> Fraction:
    """Summed density over all classes a with the given symbol."""
    _check_prime(p)
    if symbol == 1:
        return Fraction(p - 3, 2 * (p - 1))
    if symbol == -1:
        return Fraction(p - 1, 2 * (p + 1))
    return Fraction(2 * p, p * p - 1)


def predicted_piece_coefficient(p: int, n: int, parity: str) -> Fraction:
    """Coefficient of x in the k = 2n-1 ('odd') or k = 2n ('even') valuation piece."""
    if n < 1:
        raise ValueError("n must be >= 1")
    P = Fraction(p)
    if parity == "odd":
        return P ** (1 - 2 * n) - P ** (1 - 3 * n)
    if parity == "even":
        return P ** (-2 * n) - P ** (-3 * n) / (p + 1)
    raise ValueError("parity must be 'odd' or 'even'")


def piece_coefficient(p: int, k: int) -> Fraction:
    return predicted_piece_coefficient(p, (k + 1) // 2, "odd" if k % 2 else "even")


def c_p(p: int) -> Fraction:
    return Fraction(p, p * p - 1)
