"""Symbolic interval endpoints.

Every endpoint the closure recursion produces is a product

    sigma(p_j1^a1) * sigma(p_j2^a2) * ... [* T_j0]

of prime-power divisor sums ``sigma(p^a) = sum_{i<=a} p^(-r*i)`` (``a`` may be
infinite) and at most one tail factor ``T_j = prod_{k>j} 1/(1 - p_k^-r)``.

Rendering grammar (stable, also accepted by :func:`parse_expr`)::

    expr    := "1" | item ("*" item)*
    item    := "sigma(" prime "^" exponent ")" | "T_" index
    exponent:= digits | "inf"

For positive-integer r each endpoint additionally has a closed form
``q`` or ``q*zeta(r)`` with q rational, see :func:`closed_form`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .primes import nth_prime, prime_index
from .realnum import (
    Enclosure,
    ExactReal,
    Ordering,
    Precision,
    ComparisonError,
    compare,
    is_positive_integer,
    pow_enclosure,
    to_enclosure,
    zeta_enclosure,
)

INF = math.inf

Exponent = Union[int, float]


class DuplicatePrime(ValueError):
    """A factor for a prime already present in the expression was multiplied in."""


@dataclass(frozen=True, order=True)
class SigmaFactor:
    """``sigma(p_j^a)``; ``exponent`` may be :data:`INF`."""

    prime_index: int
    exponent: Exponent

    def __post_init__(self):
        if self.prime_index < 1:
            raise ValueError("prime index must be >= 1")
        if self.exponent != INF and (self.exponent < 0 or self.exponent != int(self.exponent)):
            raise ValueError(f"bad exponent {self.exponent!r}")

    @property
    def prime(self) -> int:
        return nth_prime(self.prime_index)

    def render(self) -> str:
        a = "inf" if self.exponent == INF else str(int(self.exponent))
        return f"sigma({self.prime}^{a})"


def _sigma_exact(p: int, a: Exponent, r: int) -> Fraction:
    q = p**r
    if a == INF:
        return Fraction(q, q - 1)
    a = int(a)
    # (q^(a+1) - 1) / ((q - 1) q^a)
    return Fraction(q ** (a + 1) - 1, (q - 1) * q**a)


@lru_cache(maxsize=65536)
def _sigma_cached(j: int, a: Exponent, r: Fraction, prec: int) -> ExactReal:
    p = nth_prime(j)
    if a == 0:
        return Fraction(1)
    if is_positive_integer(r):
        return _sigma_exact(p, a, int(r))
    wp = prec + 8
    x = to_enclosure(pow_enclosure(p, r, wp), wp)
    if a == INF:
        return 1 / (1 - x)
    return (1 - x ** (int(a) + 1)) / (1 - x)


def sigma_prime_power(j: int, a: Exponent, r: Fraction, prec: int = 128) -> ExactReal:
    """``sigma_{-r}(p_j^a)``; exact rational for positive-integer r."""
    return _sigma_cached(j, a, Fraction(r), prec)


@lru_cache(maxsize=4096)
def _tail_coefficient(j: int, r: Fraction, prec: int) -> ExactReal:
    coef: ExactReal = Fraction(1)
    for k in range(1, j + 1):
        x = pow_enclosure(nth_prime(k), r, prec + 8)
        coef = coef * (1 - x)
    return coef


def tail_product(j: int, r: Fraction, prec: int = 128) -> Enclosure:
    """Enclosure of ``prod_{k>j} 1/(1 - p_k^-r)`` computed as
    ``prod_{k<=j} (1 - p_k^-r) * zeta(r)``."""
    r = Fraction(r)
    coef = _tail_coefficient(j, r, prec)
    z = zeta_enclosure(r, prec + 8)
    return z * coef


@dataclass(frozen=True)
class EndpointExpr:
    """Canonical product of sigma factors and an optional tail ``T_tail``.

    ``factors`` is sorted by prime index, with no zero exponents.
    """

    factors: tuple[SigmaFactor, ...] = ()
    tail: Optional[int] = None

    @classmethod
    def one(cls) -> "EndpointExpr":
        return cls()

    @classmethod
    def tail_only(cls, j: int) -> "EndpointExpr":
        return cls((), j)

    @classmethod
    def of(cls, *factors: tuple[int, Exponent], tail: Optional[int] = None) -> "EndpointExpr":
        e = cls((), tail)
        for j, a in factors:
            e = e.mul(SigmaFactor(j, a))
        return e

    def mul(self, f: SigmaFactor) -> "EndpointExpr":
        if any(g.prime_index == f.prime_index for g in self.factors):
            raise DuplicatePrime(f"{f.render()} already present in {self.render()}")
        if f.exponent == 0:
            return self
        return EndpointExpr(tuple(sorted(self.factors + (f,))), self.tail)

    def evaluate(self, r: Fraction, prec: int = 128) -> ExactReal:
        return expr_eval(self, Fraction(r), prec)

    def render(self) -> str:
        return expr_render(self)

    def __str__(self):
        return self.render()


def expr_mul(e: EndpointExpr, f: SigmaFactor) -> EndpointExpr:
    return e.mul(f)


@lru_cache(maxsize=262144)
def expr_eval(e: EndpointExpr, r: Fraction, prec: int) -> ExactReal:
    """Value of ``e`` at exponent r: exact rationals multiply first, the
    transcendental part comes last."""
    exact = Fraction(1)
    approx: Optional[Enclosure] = None
    wp = prec + 4 * (len(e.factors) + 1)
    for f in e.factors:
        v = sigma_prime_power(f.prime_index, f.exponent, r, wp)
        if isinstance(v, Fraction):
            exact *= v
        else:
            approx = v if approx is None else approx * v
    if e.tail is not None:
        t = tail_product(e.tail, r, wp)
        approx = t if approx is None else approx * t
    if approx is None:
        return exact
    return approx * exact


def expr_render(e: EndpointExpr) -> str:
    items = [f.render() for f in e.factors]
    if e.tail is not None:
        items.append(f"T_{e.tail}")
    return "*".join(items) if items else "1"


_ITEM = re.compile(r"sigma\((\d+)\^(\d+|inf)\)|T_(\d+)")


def parse_expr(text: str) -> EndpointExpr:
    """Inverse of :func:`expr_render`."""
    text = text.replace(" ", "")
    if text == "1":
        return EndpointExpr()
    e = EndpointExpr()
    for part in text.split("*"):
        m = _ITEM.fullmatch(part)
        if m is None:
            raise ValueError(f"cannot parse endpoint item {part!r} in {text!r}")
        if m.group(3) is not None:
            if e.tail is not None:
                raise ValueError(f"two tail factors in {text!r}")
            e = EndpointExpr(e.factors, int(m.group(3)))
        else:
            a = INF if m.group(2) == "inf" else int(m.group(2))
            e = e.mul(SigmaFactor(prime_index(int(m.group(1))), a))
    return e


def closed_form(e: EndpointExpr, r: Fraction) -> tuple[Fraction, int]:
    """``(q, t)`` with value ``q * zeta(r)**t``; r must be a positive integer."""
    r = Fraction(r)
    if not is_positive_integer(r):
        raise ValueError("closed forms exist only for positive-integer r")
    q = Fraction(1)
    for f in e.factors:
        q *= _sigma_exact(f.prime, f.exponent, int(r))
    if e.tail is None:
        return q, 0
    for k in range(1, e.tail + 1):
        q *= 1 - Fraction(1, nth_prime(k) ** int(r))
    return q, 1


def render_closed_form(e: EndpointExpr, r: Fraction) -> str:
    q, t = closed_form(e, r)
    if t == 0:
        return str(q)
    z = f"zeta({int(r)})"
    return z if q == 1 else f"{q}*{z}"


_CLOSED = re.compile(r"(?:(-?\d+(?:/\d+)?)\*)?zeta\((\d+)\)|(-?\d+(?:/\d+)?)")


def parse_closed_form(text: str) -> tuple[Fraction, int, Optional[int]]:
    """Parse ``q``, ``zeta(r)`` or ``q*zeta(r)`` into ``(q, t, r)``."""
    m = _CLOSED.fullmatch(text.replace(" ", ""))
    if m is None:
        raise ValueError(f"not a closed form: {text!r}")
    if m.group(3) is not None:
        return Fraction(m.group(3)), 0, None
    q = Fraction(m.group(1)) if m.group(1) else Fraction(1)
    return q, 1, int(m.group(2))


def eval_closed_form(text: str, prec: int = 128) -> ExactReal:
    q, t, r = parse_closed_form(text)
    if t == 0:
        return q
    return zeta_enclosure(Fraction(r), prec) * q


@dataclass(frozen=True)
class ClosedInterval:
    """``[lo, hi]`` with symbolic endpoints; non-degenerate by construction."""

    lo: EndpointExpr
    hi: EndpointExpr

    def scaled(self, lo_factor: SigmaFactor, hi_factor: SigmaFactor) -> "ClosedInterval":
        return ClosedInterval(self.lo.mul(lo_factor), self.hi.mul(hi_factor))

    def enclosures(self, r: Fraction, prec: int = 128) -> tuple[Enclosure, Enclosure]:
        return (
            to_enclosure(expr_eval(self.lo, Fraction(r), prec), prec),
            to_enclosure(expr_eval(self.hi, Fraction(r), prec), prec),
        )

    def render(self) -> str:
        return f"[{self.lo.render()}, {self.hi.render()}]"


def dominated(a: EndpointExpr, b: EndpointExpr) -> bool:
    """True if ``a <= b`` follows termwise: every factor of ``a`` appears in
    ``b`` with an exponent at least as large, and any tail of ``a`` is also
    the tail of ``b``. Every factor is >= 1 and sigma(p^a) grows with a.
    """
    if a.tail is not None and a.tail != b.tail:
        return False
    mine = {f.prime_index: f.exponent for f in b.factors}
    return all(f.prime_index in mine and mine[f.prime_index] >= f.exponent for f in a.factors)


def compare_exprs(a: EndpointExpr, b: EndpointExpr, r: Fraction, precision: Precision = Precision()) -> Ordering:
    """Order two endpoint values.

    Identical canonical forms are EQUAL without evaluation. For positive
    integer r both sides reduce to ``q * zeta(r)**t``; equal t compares the
    rationals exactly. Otherwise numeric comparison with escalation.
    """
    if a == b:
        return Ordering.EQUAL
    if dominated(a, b):
        return Ordering.LESS
    if dominated(b, a):
        return Ordering.GREATER
    r = Fraction(r)
    if is_positive_integer(r):
        qa, ta = closed_form(a, r)
        qb, tb = closed_form(b, r)
        if ta == tb:
            return Ordering.LESS if qa < qb else Ordering.GREATER if qa > qb else Ordering.EQUAL
    return compare(lambda p: expr_eval(a, r, p), lambda p: expr_eval(b, r, p), precision)


def decide_exprs(a: EndpointExpr, b: EndpointExpr, r: Fraction, precision: Precision = Precision()) -> Ordering:
    """:func:`compare_exprs`, raising :class:`ComparisonError` if undecided."""
    result = compare_exprs(a, b, r, precision)
    if result is Ordering.UNDECIDED:
        raise ComparisonError(a.render(), b.render(), precision.max)
    return result
