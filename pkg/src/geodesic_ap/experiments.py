"""Empirical checks of the density theorem and its supporting propositions."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Optional

import numpy as np

from .arith import kronecker, mobius, squarefree_decompose
from .geodesics import (
    DEFAULT_THETA,
    TraceTable,
    _check_prime,
    aggregate_density,
    psi,
    psi_ap,
    psi_star,
    trace_bound,
    traces_in_class,
    predicted_density,
)
from .zagier import lambda_q_euler, lambda_V_p

CSV_HEADER = ["x", "p", "a", "symbol", "psi", "predicted", "abs_dev", "rel_dev"]


# ---------------------------------------------------------------- census


@dataclass(frozen=True)
class ResidueClassCensus:
    p: int
    count_plus: int
    count_minus: int
    count_zero: int


def census(p: int) -> ResidueClassCensus:
    """Count a mod p by the Legendre symbol of a^2 - 4, by enumeration."""
    _check_prime(p)
    counts = {1: 0, -1: 0, 0: 0}
    for a in range(p):
        counts[kronecker(a * a - 4, p)] += 1
    return ResidueClassCensus(p, counts[1], counts[-1], counts[0])


# ---------------------------------------------------------------- density tables


@dataclass(frozen=True)
class CountReport:
    """One row of a density table. ``a is None`` marks a symbol aggregate."""

    x: float
    p: int
    a: Optional[int]
    symbol: int
    psi_value: float
    predicted: float
    abs_dev: float
    rel_dev: float
    fitted_exponent: Optional[float] = None


def make_report(x, p, a, symbol, psi_value, density: Fraction) -> CountReport:
    predicted = float(density * Fraction(x))
    dev = abs(psi_value - predicted)
    rel = dev / predicted if predicted > 0 else math.nan
    return CountReport(float(x), p, a, symbol, psi_value, predicted, dev, rel)


def density_table(
    x_values: Iterable[float],
    p: int,
    table: TraceTable | None = None,
    output: str | Path | None = None,
) -> list[CountReport]:
    """Per-class rows (a ascending) followed by symbol aggregates, for each x.

    Aggregates are listed for symbols +1, -1, 0 and skipped when no class has
    that symbol (p = 3, symbol +1).
    """
    _check_prime(p)
    xs = list(x_values)
    if xs != sorted(xs):
        raise ValueError("x_values must be ascending")
    table = table or TraceTable()
    table.extend(trace_bound(xs[-1]) if xs else 2)
    reports = []
    for x in xs:
        rows = []
        for a in range(p):
            pred = predicted_density(p, a)
            rows.append(make_report(x, p, a, pred.symbol, psi_ap(x, p, a, table), pred.density))
        reports.extend(rows)
        for symbol in (1, -1, 0):
            members = [r for r in rows if r.symbol == symbol]
            if not members:
                continue
            # same summands as the member rows, summed once more exactly
            w = table.for_x(x)
            ts = [t for r in members for t in traces_in_class(w.shape[0] - 1, p, r.a)]
            total = math.fsum(w[sorted(ts)].tolist()) if ts else 0.0
            reports.append(make_report(x, p, None, symbol, total, aggregate_density(p, symbol)))
    if output is not None:
        emit_csv(reports, output)
    return reports


_AGG_ORDER = {1: 0, -1: 1, 0: 2}


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def emit_csv(reports: Iterable[CountReport], dest: str | Path | IO[str]):
    """Write reports sorted by (x, a); aggregates (a empty) follow their x block.

    ``dest`` is a path or an open text stream.
    """
    rows = sorted(
        reports,
        key=lambda r: (r.x, r.a is None, r.a if r.a is not None else _AGG_ORDER[r.symbol]),
    )
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            _write_rows(rows, fh)
    else:
        _write_rows(rows, dest)


def _write_rows(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            _fmt(r.x), r.p, "" if r.a is None else r.a, r.symbol,
            _fmt(r.psi_value), _fmt(r.predicted), _fmt(r.abs_dev), _fmt(r.rel_dev),
        ])


def read_csv(path: str | Path) -> list[CountReport]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [
            CountReport(
                float(x), int(p), None if a == "" else int(a), int(s),
                float(v), float(pr), float(ad), float(rd),
            )
            for x, p, a, s, v, pr, ad, rd in reader
        ]


def emit_loglog(reports: Iterable[CountReport], path: str | Path):
    """Two-column "log x  log|dev|" data, one block per class, for gnuplot."""
    by_class: dict = {}
    for r in reports:
        if r.abs_dev > 0:
            by_class.setdefault((r.a is None, r.a, r.symbol), []).append(r)
    with open(path, "w") as fh:
        for key in sorted(by_class, key=lambda k: (k[0], -1 if k[1] is None else k[1], k[2])):
            rows = by_class[key]
            label = f"a={rows[0].a}" if rows[0].a is not None else f"symbol={rows[0].symbol}"
            fh.write(f"# p={rows[0].p} {label}\n")
            for r in sorted(rows, key=lambda r: r.x):
                fh.write(f"{math.log(r.x):.12g} {math.log(r.abs_dev):.12g}\n")
            fh.write("\n\n")


# ---------------------------------------------------------------- error exponent


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float
    n_used: int


def error_exponent_fit(reports: Iterable[CountReport]) -> ExponentFit | None:
    """Least-squares slope of log|dev| against log x; None if under 2 usable rows."""
    rows = [r for r in reports if r.abs_dev > 0]
    if len({(r.p, r.a) for r in rows}) > 1:
        raise ValueError("fit expects a single (p, a) series")
    if len(rows) < 2:
        return None
    lx = np.log([r.x for r in rows])
    ly = np.log([r.abs_dev for r in rows])
    (slope, intercept), res, *_ = np.polyfit(lx, ly, 1, full=True)
    residual = float(math.sqrt(res[0] / len(rows))) if len(res) else 0.0
    return ExponentFit(float(slope), float(intercept), residual, len(rows))


# ---------------------------------------------------------------- propositions


@dataclass(frozen=True)
class Prop21Result:
    p: int
    n: int
    r: int
    q: int
    X: float
    lhs: int
    main: float
    deviation: float


def prop21_check(p: int, n: int, r: int, q: int, X: float) -> Prop21Result:
    """Compare sum_{3 <= t <= X, t = r (p^n)} lambda_q(t^2 - 4) with (X/p^n) mu(b)/b."""
    _check_prime(p)
    if math.gcd(q, p) != 1:
        raise ValueError("q must be coprime to p")
    mod = p**n
    ts = traces_in_class(math.floor(X), mod, r % mod)
    lhs = sum(lambda_q_euler(q, t * t - 4) for t in ts)
    b, _ = squarefree_decompose(q)
    main = X / mod * mobius(b) / b
    return Prop21Result(p, n, r, q, X, lhs, main, lhs - main)


@dataclass(frozen=True)
class Prop22Result:
    x: float
    u: float
    p: int
    n: int
    r: int
    V: float
    direct: float
    smoothed: float
    target: float

    @property
    def direct_rel(self) -> float:
        return (self.direct - self.target) / self.target

    @property
    def smoothed_rel(self) -> float:
        return (self.smoothed - self.target) / self.target


def prop22_check(
    x: float,
    u: float,
    p: int,
    n: int,
    r: int,
    V: float | None = None,
    theta=DEFAULT_THETA,
    route: str = "zagier",
    table: TraceTable | None = None,
) -> Prop22Result:
    """Psi*(x+u) - Psi*(x) directly and through the smoothed sums Lambda_V^p.

    V defaults to u x^(-1/2 + theta), clamped below at 1.
    """
    _check_prime(p)
    if not math.sqrt(x) <= u <= x:
        raise ValueError("need sqrt(x) <= u <= x")
    if V is None:
        V = max(1.0, u * x ** (-0.5 + float(theta)))
    direct = psi_star(x + u, p, n, r, route, table) - psi_star(x, p, n, r, route, table)
    mod = p**n
    lo, hi = trace_bound(x), trace_bound(x + u)
    ts = [t for t in traces_in_class(hi, mod, r % mod) if t > lo]
    smoothed = 2 * math.fsum(t * lambda_V_p(t * t - 4, p, V) for t in ts)
    return Prop22Result(x, u, p, n, r, V, direct, smoothed, u / mod)


def psi_total_check(reports: list[CountReport], table: TraceTable) -> dict[float, float]:
    """psi(x) minus the sum of per-class rows, per x."""
    out = {}
    for x in sorted({r.x for r in reports}):
        rows = [r.psi_value for r in reports if r.x == x and r.a is not None]
        out[x] = psi(x, table) - math.fsum(rows)
    return out
