"""Command-line entry point.

Exit codes: 0 success, 1 computation error, 2 usage error, 3 strict-mode breach.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .arith import is_prime
from .experiments import (
    census,
    density_table,
    emit_csv,
    emit_loglog,
    error_exponent_fit,
    make_report,
    prop21_check,
    prop22_check,
)
from .geodesics import DEFAULT_THETA, TraceTable, predicted_density, psi, psi_ap, trace_bound
from .quadratic import CacheError, ClassCache

CACHE_ENV = "GEODESIC_AP_CACHE"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BREACH = 0, 1, 2, 3

log = logging.getLogger("geodesic_ap")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    x: list[float] = field(default_factory=list)
    p: Optional[int] = None
    a: Optional[int] = None
    n: int = 1
    r: list[int] = field(default_factory=lambda: [0])
    q: list[int] = field(default_factory=list)
    X: float = 1e5
    u: Optional[float] = None
    V: Optional[float] = None
    theta: float = float(DEFAULT_THETA)
    cache_path: Optional[str] = None
    output_path: Optional[str] = None
    loglog_path: Optional[str] = None
    workers: int = 1
    strict: bool = False
    max_rel_dev: float = 0.10
    min_improving: float = 0.80
    t_max: int = 200
    q_max: int = 300
    p_max: Optional[int] = None

    def validate(self):
        if self.p is not None:
            if self.p == 2:
                raise UsageError("p = 2 not covered: the density theorem is for odd primes p >= 3")
            if self.p < 3 or not is_prime(self.p):
                raise UsageError(f"--p must be an odd prime, got {self.p}")
        if not 0 <= self.theta <= 0.5:
            raise UsageError("--theta must lie in [0, 1/2]")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if any(x <= 0 for x in self.x):
            raise UsageError("x values must be positive")


def _float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def _float_list(s: str) -> list[float]:
    return [_float(v) for v in s.split(",") if v.strip()]


def _int_list(s: str) -> list[int]:
    """'1,2,5' or '1:30' (inclusive range) or a mix."""
    out = []
    for part in s.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ":" in part:
                lo, hi = part.split(":")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad integer list {s!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geodesic-ap",
        description="Prime geodesic counts for PSL2(Z) in progressions of the trace.",
    )
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, p_required=False):
        sp.add_argument("--cache", dest="cache_path", default=None,
                        help=f"class-record cache file (default ${CACHE_ENV})")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--p", type=int, required=p_required)

    sp = sub.add_parser("count", help="Psi(x) or Psi(x; p, a)")
    common(sp)
    sp.add_argument("--x", type=_float, required=True)
    sp.add_argument("--a", type=int)

    sp = sub.add_parser("verify-theorem", help="density table, aggregates and exponent fits")
    common(sp, p_required=True)
    sp.add_argument("--x-list", dest="x", type=_float_list, required=True)
    sp.add_argument("--output", dest="output_path")
    sp.add_argument("--loglog", dest="loglog_path")
    sp.add_argument("--theta", type=_float, default=float(DEFAULT_THETA))
    sp.add_argument("--max-rel-dev", type=_float, default=0.10)
    sp.add_argument("--min-improving", type=_float, default=0.80)
    sp.add_argument("--strict", action="store_true")

    for name in ("verify-prop21", "prop21"):
        sp = sub.add_parser(name, help="main term of sums of lambda_q(t^2 - 4)")
        common(sp, p_required=True)
        sp.add_argument("--n", type=int, default=1)
        sp.add_argument("--r", type=_int_list, default=[0])
        sp.add_argument("--q", type=_int_list, required=True)
        sp.add_argument("--X", type=_float, default=1e5)
        sp.add_argument("--strict", action="store_true")

    sp = sub.add_parser("verify-prop22", help="short-interval Psi* against its smoothed proxy")
    common(sp, p_required=True)
    sp.add_argument("--x", type=_float, required=True)
    sp.add_argument("--u", type=_float)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--r", type=_int_list, default=[0])
    sp.add_argument("--V", type=_float)
    sp.add_argument("--theta", type=_float, default=float(DEFAULT_THETA))

    sp = sub.add_parser("lambda-check", help="Euler-product vs exponential-sum coefficients")
    sp.add_argument("--t-max", type=int, default=200)
    sp.add_argument("--q-max", type=int, default=300)

    sp = sub.add_parser("classdata", help="prebuild class records for all t <= X(x)")
    common(sp)
    sp.add_argument("--x", type=_float, required=True)

    sp = sub.add_parser("census", help="residues a mod p by the symbol of a^2 - 4")
    sp.add_argument("--p", type=int)
    sp.add_argument("--p-max", type=int)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    if isinstance(values.get("x"), float):
        values["x"] = [values["x"]]
    if "cache_path" not in values and os.environ.get(CACHE_ENV):
        values["cache_path"] = os.environ[CACHE_ENV]
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _table(cfg: RunConfig) -> TraceTable:
    return TraceTable(ClassCache(cfg.cache_path), workers=cfg.workers)


def _g(v: float) -> str:
    return f"{v:.12g}"


def cmd_count(cfg: RunConfig, out) -> int:
    table = _table(cfg)
    x = cfg.x[0]
    if cfg.p is None:
        value = psi(x, table)
        print("x,psi,predicted,rel_dev", file=out)
        print(f"{_g(x)},{_g(value)},{_g(x)},{_g(abs(value - x) / x)}", file=out)
        return EXIT_OK
    residues = [cfg.a % cfg.p] if cfg.a is not None else list(range(cfg.p))
    print("x,p,a,symbol,psi,predicted,abs_dev,rel_dev", file=out)
    for a in residues:
        pred = predicted_density(cfg.p, a)
        r = make_report(x, cfg.p, a, pred.symbol, psi_ap(x, cfg.p, a, table), pred.density)
        print(",".join([_g(r.x), str(r.p), str(r.a), str(r.symbol), _g(r.psi_value),
                        _g(r.predicted), _g(r.abs_dev), _g(r.rel_dev)]), file=out)
    return EXIT_OK


def theorem_breaches(reports, max_rel_dev: float, min_improving: float) -> list[str]:
    """Threshold violations: relative deviation at the largest x, and the share
    of classes whose deviation shrinks from the smallest to the largest x."""
    xs = sorted({r.x for r in reports})
    if not xs:
        return []
    breaches = []
    for r in reports:
        if r.x == xs[-1] and r.predicted > 0 and r.rel_dev > max_rel_dev:
            label = f"a={r.a}" if r.a is not None else f"symbol {r.symbol:+d} aggregate"
            breaches.append(f"p={r.p} {label}: rel_dev {r.rel_dev:.4g} > {max_rel_dev}")
    if len(xs) >= 2:
        first = {r.a: r.rel_dev for r in reports if r.x == xs[0] and r.a is not None}
        last = {r.a: r.rel_dev for r in reports if r.x == xs[-1] and r.a is not None}
        better = sum(last[a] < first[a] for a in first)
        if better < min_improving * len(first):
            breaches.append(f"only {better}/{len(first)} classes improve from x={xs[0]:g} to x={xs[-1]:g}")
    return breaches


def cmd_verify_theorem(cfg: RunConfig, out) -> int:
    if len(cfg.x) < 2:
        raise UsageError("--x-list needs at least two values")
    xs = sorted(cfg.x)
    table = _table(cfg)
    reports = density_table(xs, cfg.p, table, output=cfg.output_path)
    if cfg.output_path is None:
        emit_csv(reports, out)
    if cfg.loglog_path:
        emit_loglog(reports, cfg.loglog_path)
    expect = 0.75 + cfg.theta / 2
    print(f"# error exponent fits (theorem error term exponent 3/4 + theta/2 = {expect:.4f})", file=out)
    for a in range(cfg.p):
        fit = error_exponent_fit([r for r in reports if r.a == a])
        if fit is None:
            print(f"# a={a}: fit undefined", file=out)
        else:
            print(f"# a={a}: slope {fit.slope:.4f} residual {fit.residual:.4f} rows {fit.n_used}", file=out)
    breaches = theorem_breaches(reports, cfg.max_rel_dev, cfg.min_improving)
    for b in breaches:
        print(f"# BREACH {b}", file=out)
    if breaches and cfg.strict:
        return EXIT_BREACH
    return EXIT_OK


def cmd_prop21(cfg: RunConfig, out, C: float = 20.0, exponent: float = 0.6) -> int:
    print("p,n,r,q,X,lhs,main,deviation,bound", file=out)
    bad = 0
    for r in cfg.r:
        for q in cfg.q:
            if math.gcd(q, cfg.p) != 1 or q < 1:
                continue
            res = prop21_check(cfg.p, cfg.n, r, q, cfg.X)
            bound = C * q**exponent
            bad += abs(res.deviation) > bound
            print(f"{res.p},{res.n},{res.r},{res.q},{_g(res.X)},{res.lhs},{_g(res.main)},"
                  f"{_g(res.deviation)},{_g(bound)}", file=out)
    if bad:
        print(f"# BREACH {bad} rows exceed {C}*q^{exponent}", file=out)
        if cfg.strict:
            return EXIT_BREACH
    return EXIT_OK


def cmd_prop22(cfg: RunConfig, out) -> int:
    x = cfg.x[0]
    u = cfg.u if cfg.u is not None else x
    route = "zagier" if x + u <= 1e6 else "class"
    table = _table(cfg) if route == "class" else None
    print("x,u,p,n,r,V,direct,smoothed,target,direct_rel,smoothed_rel", file=out)
    for r in cfg.r:
        res = prop22_check(x, u, cfg.p, cfg.n, r, cfg.V, Fraction(cfg.theta).limit_denominator(10**6), route, table)
        print(",".join(_g(v) if isinstance(v, float) else str(v) for v in (
            res.x, res.u, res.p, res.n, res.r, float(res.V), res.direct, res.smoothed,
            res.target, res.direct_rel, res.smoothed_rel)), file=out)
    return EXIT_OK


def cmd_lambda_check(cfg: RunConfig, out) -> int:
    import numpy as np

    from .zagier import lambda_q_euler, lambda_q_expsum_many

    ts = np.arange(3, cfg.t_max + 1)
    mismatches = 0
    for q in range(1, cfg.q_max + 1):
        exp = lambda_q_expsum_many(q, ts)
        for t, v in zip(ts.tolist(), exp.tolist()):
            if v != lambda_q_euler(q, t * t - 4):
                mismatches += 1
    print(f"t in [3, {cfg.t_max}], q in [1, {cfg.q_max}]: {mismatches} mismatches", file=out)
    return EXIT_OK if mismatches == 0 else EXIT_BREACH


def cmd_classdata(cfg: RunConfig, out) -> int:
    table = _table(cfg)
    before = len(table.cache)
    table.extend(trace_bound(cfg.x[0]))
    print(f"traces 3..{table.t_max}: {len(table.cache)} records "
          f"({len(table.cache) - before} new)", file=out)
    return EXIT_OK


def cmd_census(cfg: RunConfig, out) -> int:
    if cfg.p is not None:
        primes = [cfg.p]
    elif cfg.p_max is not None:
        primes = [p for p in range(3, cfg.p_max + 1) if is_prime(p)]
    else:
        raise UsageError("census needs --p or --p-max")
    print("p,count_plus,count_minus,count_zero,closed_form_ok", file=out)
    ok = True
    for p in primes:
        c = census(p)
        good = (c.count_plus, c.count_minus, c.count_zero) == ((p - 3) // 2, (p - 1) // 2, 2)
        ok &= good
        print(f"{p},{c.count_plus},{c.count_minus},{c.count_zero},{int(good)}", file=out)
    return EXIT_OK if ok else EXIT_BREACH


COMMANDS = {
    "count": cmd_count,
    "verify-theorem": cmd_verify_theorem,
    "verify-prop21": cmd_prop21,
    "prop21": cmd_prop21,
    "verify-prop22": cmd_prop22,
    "lambda-check": cmd_lambda_check,
    "classdata": cmd_classdata,
    "census": cmd_census,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"geodesic-ap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, CacheError, OSError, ValueError) as exc:
        print(f"geodesic-ap: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
