"""Brute-force checks of a computed closure, and the density threshold eta.

Values sigma_{-r}(n) for all n <= N come from a multiplicative numpy sieve in
double precision. A value whose float lies too close to an interval endpoint
to classify safely is re-checked symbolically (as a product of prime-power
factors, exact for integer r); if even that cannot separate it from the
endpoint it is reported as unclassified rather than guessed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .endpoints import (
    INF,
    ClosedInterval,
    EndpointExpr,
    SigmaFactor,
    compare_exprs,
    expr_eval,
    parse_expr,
    sigma_prime_power,
)
from .primes import prime_index, primes_up_to
from .realnum import (
    Enclosure,
    ExactReal,
    Ordering,
    Precision,
    RangeError,
    compare,
    parse_real,
    pow_enclosure,
    to_enclosure,
    zeta_enclosure,
)

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 10**6
MAX_LIMIT = 10**8
CHUNK = 1 << 18
# relative error bound on the float sieve values (a few dozen roundings)
FLOAT_SLACK = 1e-12

Endpoint = Union[EndpointExpr, Fraction]


class SpfTable:
    """Smallest prime factor of every 2 <= n <= limit."""

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError("limit must be >= 1")
        self.limit = int(limit)
        spf = np.arange(self.limit + 1, dtype=np.int64)
        for p in reversed(primes_up_to(math.isqrt(self.limit))):
            spf[p * p :: p] = p
        self.spf = spf

    def factorize(self, n: int) -> list[tuple[int, int]]:
        if not 1 <= n <= self.limit:
            raise ValueError(f"{n} outside 1..{self.limit}")
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.spf[n])
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        return out


def _factorize(n: int, table: SpfTable | None) -> list[tuple[int, int]]:
    if table is not None and n <= table.limit:
        return table.factorize(n)
    out, p = [], 2
    while p * p <= n:
        a = 0
        while n % p == 0:
            n //= p
            a += 1
        if a:
            out.append((p, a))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def sigma_expr(n: int, table: SpfTable | None = None) -> EndpointExpr:
    """sigma_{-r}(n) as a symbolic product over the prime powers of n."""
    e = EndpointExpr.one()
    for p, a in _factorize(n, table):
        e = e.mul(SigmaFactor(prime_index(p), a))
    return e


def sigma_value(n: int, r, table: SpfTable | None = None, prec: int = 128) -> ExactReal:
    """sigma_{-r}(n) via multiplicativity; exact for positive-integer r."""
    r = parse_real(r)
    value: ExactReal = Fraction(1)
    for p, a in _factorize(n, table):
        value = value * sigma_prime_power(prime_index(p), a, r, prec)
    return value


def sigma_values(limit: int, r) -> np.ndarray:
    """Float64 array ``v`` with ``v[n] = sigma_{-r}(n)`` for 1 <= n <= limit."""
    r = float(parse_real(r))
    vals = np.ones(limit + 1, dtype=np.float64)
    vals[0] = np.nan
    for p in primes_up_to(limit):
        x = float(p) ** -r
        prev, cur, term, pa = 1.0, 1.0 + x, x, p
        while pa <= limit:
            vals[pa::pa] *= cur / prev
            term *= x
            prev, cur = cur, cur + term
            pa *= p
    return vals


def parse_endpoint(x) -> Endpoint:
    """A product expression such as ``sigma(3^1)*T_2``, or a plain rational."""
    if isinstance(x, EndpointExpr):
        return x
    if isinstance(x, str):
        try:
            return parse_expr(x)
        except ValueError:
            pass
    return parse_real(x)


def _normalize(intervals: Iterable) -> list[tuple[Endpoint, Endpoint]]:
    out = []
    for item in intervals:
        lo, hi = (item.lo, item.hi) if isinstance(item, ClosedInterval) else item
        out.append((parse_endpoint(lo), parse_endpoint(hi)))
    return out


def _witness(e: Endpoint) -> int | None:
    """Integer m with sigma_{-r}(m) == e, when e is such a value."""
    if isinstance(e, Fraction):
        return 1 if e == 1 else None
    if e.tail is not None or any(f.exponent == INF for f in e.factors):
        return None
    m = 1
    for f in e.factors:
        m *= f.prime ** int(f.exponent)
    return m


def _endpoint_value(e: Endpoint, r: Fraction, prec: int) -> ExactReal:
    return expr_eval(e, r, prec) if isinstance(e, EndpointExpr) else e


def _order(x: EndpointExpr, e: Endpoint, r: Fraction, precision: Precision) -> Ordering:
    if isinstance(e, EndpointExpr):
        return compare_exprs(x, e, r, precision)
    return compare(lambda p: expr_eval(x, r, p), e, precision)


@dataclass
class DensityReport:
    """Outcome of classifying sigma_{-r}(n) for n = 1..N.

    ``sum(counts) + unclassified + len(violations) == N``.
    """

    N: int
    counts: list[int]
    unclassified: int = 0
    violations: list[int] = field(default_factory=list)

    @property
    def densities(self) -> list[float]:
        return [c / self.N for c in self.counts]

    @property
    def ok(self) -> bool:
        return not self.violations


def _classify_exact(n, x, bounds, r, precision) -> tuple[str, int]:
    """('in', k) | ('gap', k) | ('unclassified', -1) for one value."""
    for k, (lo, hi) in enumerate(bounds):
        c = _order(x, lo, r, precision)
        if c is Ordering.UNDECIDED:
            return "unclassified", -1
        if c is Ordering.LESS:
            return "gap", k
        c = _order(x, hi, r, precision)
        if c is Ordering.UNDECIDED:
            return "unclassified", -1
        if c is not Ordering.GREATER:
            return "in", k
    return "gap", len(bounds)


def classify(r, limit: int, intervals: Sequence, precision: Precision = Precision(),
             table: SpfTable | None = None) -> DensityReport:
    """Place every sigma_{-r}(n), n <= limit, in an interval or a gap."""
    r = parse_real(r)
    if not 1 <= limit <= MAX_LIMIT:
        raise ValueError(f"limit must be in 1..{MAX_LIMIT}")
    bounds = _normalize(intervals)
    prec = precision.base
    enc = [(to_enclosure(_endpoint_value(lo, r, prec), prec).float_bounds(),
            to_enclosure(_endpoint_value(hi, r, prec), prec).float_bounds()) for lo, hi in bounds]
    lo_dn = np.array([e[0][0] for e in enc])
    lo_up = np.array([e[0][1] for e in enc])
    hi_dn = np.array([e[1][0] for e in enc])
    hi_up = np.array([e[1][1] for e in enc])

    # m | n implies sigma(n) >= sigma(m): settles values that crowd just
    # above a left endpoint sigma(m) beyond float resolution
    witnesses = [_witness(lo) for lo, _ in bounds]
    values = sigma_values(limit, r)
    if table is None or table.limit < limit:
        table = SpfTable(limit)
    report = DensityReport(limit, [0] * len(bounds))
    for start in range(1, limit + 1, CHUNK):
        stop = min(limit + 1, start + CHUNK)
        v = values[start:stop]
        ns = np.arange(start, stop, dtype=np.int64)
        vmin, vmax = v * (1 - FLOAT_SLACK), v * (1 + FLOAT_SLACK)
        settled = np.zeros(v.shape, dtype=bool)
        for k in range(len(bounds)):
            above_lo = vmin >= lo_up[k]
            if witnesses[k] is not None:
                above_lo |= ns % witnesses[k] == 0
            inside = above_lo & (vmax <= hi_dn[k])
            report.counts[k] += int(inside.sum())
            settled |= inside
            left = hi_up[k - 1] if k else -np.inf
            gap = (vmin > left) & (vmax < lo_dn[k])
            settled |= gap
            report.violations.extend((np.flatnonzero(gap) + start).tolist())
        above = vmin > hi_up[-1] if bounds else np.ones(v.shape, dtype=bool)
        settled |= above
        report.violations.extend((np.flatnonzero(above) + start).tolist())
        for n in (np.flatnonzero(~settled) + start).tolist():
            kind, k = _classify_exact(n, sigma_expr(n, table), bounds, r, precision)
            if kind == "in":
                report.counts[k] += 1
            elif kind == "gap":
                report.violations.append(n)
            else:
                report.unclassified += 1
    report.violations.sort()
    log.debug("classified %d values: %s, %d unclassified", limit, report.counts, report.unclassified)
    return report


def empirical_densities(r, limit: int, intervals: Sequence, precision: Precision = Precision()) -> DensityReport:
    return classify(r, limit, intervals, precision)


def gap_violations(r, limit: int, intervals: Sequence, precision: Precision = Precision()) -> list[int]:
    """Every n <= limit whose value lies strictly outside all intervals."""
    return classify(r, limit, intervals, precision).violations


# -- density threshold eta -------------------------------------------------

def _eta_lhs(s: Fraction, prec: int) -> ExactReal:
    x = pow_enclosure(2, s, prec + 8)
    y = pow_enclosure(3, s, prec + 8)
    if isinstance(x, Fraction):
        return 1 / (1 - x) * (1 + y) / (1 - y)
    x, y = to_enclosure(x, prec + 8), to_enclosure(y, prec + 8)
    return 1 / (1 - x) * (1 + y) / (1 - y)


def eta_sign(s, precision: Precision = Precision()) -> int:
    """Certified sign of ``2^s/(2^s-1) * (3^s+1)/(3^s-1) - zeta(s)``."""
    s = parse_real(s)
    c = compare(lambda p: _eta_lhs(s, p), lambda p: zeta_enclosure(s, p), precision)
    if c is Ordering.UNDECIDED:
        raise RangeError(f"sign of the threshold equation at s = {s} is undecided")
    return {Ordering.LESS: -1, Ordering.GREATER: 1, Ordering.EQUAL: 0}[c]


def eta_solve(tol: float = 1e-6, lo="1.5", hi="2", precision: Precision = Precision()) -> Enclosure:
    """Bracket of the threshold eta in (1, 2] of width <= tol, by bisection."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = parse_real(lo), parse_real(hi)
    sa, sb = eta_sign(a, precision), eta_sign(b, precision)
    if sa == 0:
        return Enclosure.between(a, a, precision.base)
    if sb == 0:
        return Enclosure.between(b, b, precision.base)
    if sa == sb:
        raise RangeError(f"no certified sign change on [{a}, {b}]")
    tol = Fraction(tol)
    while b - a > tol:
        m = (a + b) / 2
        sm = eta_sign(m, precision)
        if sm == 0:
            return Enclosure.between(m, m, precision.base)
        if sm == sa:
            a = m
        else:
            b = m
    return Enclosure.between(a, b, precision.base)
