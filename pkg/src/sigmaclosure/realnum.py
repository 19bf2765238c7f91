"""Certified real arithmetic.

Exact values are plain :class:`fractions.Fraction` objects. Everything
transcendental is an :class:`Enclosure`, an interval ``[lo, hi]`` of binary
floats whose bounds are rounded outward on every operation. The union of the
two is what the rest of the package calls an *exact real*.

The interval kernels come from ``mpmath.libmp.libmpi`` (directed-rounding
mpf operations); this module only adds precision bookkeeping, the zeta
evaluator and the escalating comparison.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import mpmath
from mpmath.libmp import (
    from_int,
    from_rational,
    libmpi,
    mpf_le,
    mpf_lt,
    mpf_shift,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_float,
    to_rational,
)

__all__ = [
    "ComparisonError",
    "Enclosure",
    "ExactReal",
    "Ordering",
    "Precision",
    "RangeError",
    "compare",
    "decide",
    "parse_real",
    "pow_enclosure",
    "to_enclosure",
    "zeta_enclosure",
]

DEFAULT_PREC = 128
DEFAULT_MAX_PREC = 4096
ZETA_MIN_GAP = Fraction(1, 2**20)
ZETA_MAX_TERMS = 2**26


class RangeError(ArithmeticError):
    """Requested quantity cannot be certified within the iteration limits."""


class ComparisonError(ArithmeticError):
    """Two quantities could not be separated up to the maximum precision."""

    def __init__(self, left: str, right: str, max_prec: int):
        self.left = left
        self.right = right
        self.max_prec = max_prec
        super().__init__(f"undecided comparison at {max_prec} bits: {left} vs {right}")


@dataclass(frozen=True)
class Precision:
    """Working precision policy: start at ``base`` bits, double up to ``max``."""

    base: int = DEFAULT_PREC
    max: int = DEFAULT_MAX_PREC

    def __post_init__(self):
        if self.base < 16 or self.max < self.base:
            raise ValueError(f"invalid precision policy {self.base}..{self.max}")

    def levels(self):
        prec = self.base
        while prec <= self.max:
            yield prec
            prec *= 2


def parse_real(text: Union[str, int, Fraction]) -> Fraction:
    """Parse a decimal or ``p/q`` string exactly."""
    if isinstance(text, Fraction):
        return text
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a decimal or rational number: {text!r}") from exc


def _raw_to_fraction(x) -> Fraction:
    p, q = to_rational(x)
    return Fraction(int(p), int(q))


@dataclass(frozen=True, eq=False)
class Enclosure:
    """Closed interval ``[lo, hi]`` certainly containing some real value.

    ``a`` and ``b`` are raw mpf tuples; use :attr:`lo` / :attr:`hi` for
    mpmath numbers or :meth:`bounds` for exact fractions.
    """

    a: tuple
    b: tuple
    prec: int

    def __post_init__(self):
        if mpf_lt(self.b, self.a):
            raise ValueError("enclosure with lo > hi")

    @classmethod
    def exact(cls, x: Union[int, Fraction], prec: int) -> "Enclosure":
        x = Fraction(x)
        if x.denominator == 1:
            n = int(x)
            return cls(from_int(n, prec, round_floor), from_int(n, prec, round_ceiling), prec)
        return cls(
            from_rational(x.numerator, x.denominator, prec, round_floor),
            from_rational(x.numerator, x.denominator, prec, round_ceiling),
            prec,
        )

    @classmethod
    def between(cls, lo: Fraction, hi: Fraction, prec: int) -> "Enclosure":
        lo, hi = Fraction(lo), Fraction(hi)
        return cls(
            from_rational(lo.numerator, lo.denominator, prec, round_floor),
            from_rational(hi.numerator, hi.denominator, prec, round_ceiling),
            prec,
        )

    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.mpf(self.a)

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.mpf(self.b)

    def bounds(self) -> tuple[Fraction, Fraction]:
        return _raw_to_fraction(self.a), _raw_to_fraction(self.b)

    def float_bounds(self) -> tuple[float, float]:
        """Double-precision bounds, still rounded outward."""
        return to_float(self.a, rnd=round_floor), to_float(self.b, rnd=round_ceiling)

    def mid(self) -> mpmath.mpf:
        return mpmath.mpf(libmpi.mpi_mid((self.a, self.b), self.prec))

    def width(self) -> mpmath.mpf:
        return mpmath.mpf(mpf_sub(self.b, self.a))

    def rel_width_ok(self, bits: int) -> bool:
        """True when ``hi - lo <= 2**-bits * |lo|`` (lo > 0 assumed)."""
        return mpf_le(mpf_sub(self.b, self.a), mpf_shift(self.a, -bits))

    def contains(self, x: Union[int, Fraction, "Enclosure"]) -> bool:
        if isinstance(x, Enclosure):
            return mpf_le(self.a, x.a) and mpf_le(x.b, self.b)
        lo, hi = self.bounds()
        return lo <= x <= hi

    def overlaps(self, other: "Enclosure") -> bool:
        return mpf_le(self.a, other.b) and mpf_le(other.a, self.b)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Enclosure":
        if isinstance(other, Enclosure):
            return other
        return Enclosure.exact(other, self.prec)

    def _wrap(self, ab, prec: int) -> "Enclosure":
        return Enclosure(ab[0], ab[1], prec)

    def __add__(self, other):
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        return self._wrap(libmpi.mpi_add((self.a, self.b), (o.a, o.b), prec), prec)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        return self._wrap(libmpi.mpi_sub((self.a, self.b), (o.a, o.b), prec), prec)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        return self._wrap(libmpi.mpi_mul((self.a, self.b), (o.a, o.b), prec), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if mpf_le(o.a, from_int(0)) and mpf_le(from_int(0), o.b):
            raise ZeroDivisionError("division by an enclosure containing 0")
        prec = max(self.prec, o.prec)
        return self._wrap(libmpi.mpi_div((self.a, self.b), (o.a, o.b), prec), prec)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __neg__(self):
        return self._wrap(libmpi.mpi_neg((self.a, self.b)), self.prec)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("use exp/log for non-integer powers")
        return self._wrap(libmpi.mpi_pow_int((self.a, self.b), n, self.prec), self.prec)

    def exp(self) -> "Enclosure":
        return self._wrap(libmpi.mpi_exp((self.a, self.b), self.prec), self.prec)

    def log(self) -> "Enclosure":
        if not mpf_lt(from_int(0), self.a):
            raise ValueError("log of an enclosure reaching 0")
        return self._wrap(libmpi.mpi_log((self.a, self.b), self.prec), self.prec)

    def sqrt(self) -> "Enclosure":
        return self._wrap(libmpi.mpi_sqrt((self.a, self.b), self.prec), self.prec)

    def __repr__(self):
        digits = max(6, int(self.prec * 0.30103))
        return f"Enclosure([{mpmath.libmp.to_str(self.a, digits)}, {mpmath.libmp.to_str(self.b, digits)}], prec={self.prec})"


ExactReal = Union[Fraction, Enclosure]


def to_enclosure(x: Union[int, ExactReal], prec: int) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure.exact(x, prec)


def is_positive_integer(r: Fraction) -> bool:
    return r.denominator == 1 and r > 0


@lru_cache(maxsize=65536)
def pow_enclosure(p: int, r: Fraction, prec: int) -> ExactReal:
    """Value of ``p ** -r``, exact when r is a positive integer.

    Otherwise an enclosure with relative width at most ``2**(1 - prec)``.
    """
    r = Fraction(r)
    if is_positive_integer(r):
        return Fraction(1, p ** int(r))
    if p == 1:
        return Fraction(1)
    guard = 16
    while True:
        wp = prec + guard
        x = -(Enclosure.exact(r, wp) * Enclosure.exact(p, wp).log())
        res = x.exp()
        if res.rel_width_ok(prec - 1):
            return res
        guard *= 2


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> Fraction:
    p, q = mpmath.bernfrac(n)
    return Fraction(int(p), int(q))


def _zeta_tail(r: Fraction, n_start: int, wp: int):
    """Rational bracket ``(centre, radius)`` with
    ``sum_{n >= N} n**-r = N**-r * (centre + theta * radius)``, ``|theta| <= 1``.

    Euler-Maclaurin on ``f(x) = x**-r``. The remainder after M correction terms
    is bounded by ``|B_2M| / (2M)! * (r)_2M * N**(1 - 2M) / (r + 2M - 1)`` times
    ``N**-r``, using ``max |B_2M(x)| = |B_2M|`` on [0, 1]. Returns None if the
    series diverges before the requested accuracy.
    """
    N = Fraction(n_start)
    centre = N / (r - 1) + Fraction(1, 2)
    target = centre / 2**wp
    rising = r  # (r)_{2k-1}
    fact = Fraction(1)  # (2k)!
    npow = Fraction(1, n_start)  # N**(1-2k)
    best = None
    k = 1
    while True:
        fact *= (2 * k - 1) * (2 * k)
        term = _bernoulli(2 * k) / fact * rising * npow
        rising_even = rising * (r + 2 * k - 1)  # (r)_{2k}
        radius = abs(_bernoulli(2 * k)) / fact * rising_even * npow / (r + 2 * k - 1)
        if best is not None and radius > best:
            return None
        best = radius
        centre += term
        if radius <= target:
            return centre, radius
        rising = rising_even * (r + 2 * k)
        npow /= n_start * n_start
        k += 1


@lru_cache(maxsize=1024)
def zeta_enclosure(r: Fraction, prec: int = DEFAULT_PREC) -> Enclosure:
    """Certified enclosure of zeta(r) for rational r > 1.

    Relative width is at most ``2**-prec``.
    """
    r = Fraction(r)
    if r <= 1 + ZETA_MIN_GAP:
        raise RangeError(f"zeta({r}) is outside the supported range r > 1 + 2^-20")
    wp = prec + 24
    n_start = max(10, prec // 8 + 10)
    while n_start <= ZETA_MAX_TERMS:
        tail = _zeta_tail(r, n_start, wp)
        if tail is not None:
            centre, radius = tail
            partial = Enclosure.exact(1, wp)
            for n in range(2, n_start):
                partial = partial + to_enclosure(pow_enclosure(n, r, wp), wp)
            scale = to_enclosure(pow_enclosure(n_start, r, wp), wp)
            result = partial + scale * Enclosure.between(centre - radius, centre + radius, wp)
            if result.rel_width_ok(prec):
                return result
            wp += 32
        n_start *= 2
    raise RangeError(f"zeta({r}) needs more than {ZETA_MAX_TERMS} terms at {prec} bits")


class Ordering(enum.Enum):
    LESS = "<"
    EQUAL = "="
    GREATER = ">"
    UNDECIDED = "?"

    def flipped(self) -> "Ordering":
        return _FLIP[self]


_FLIP = {
    Ordering.LESS: Ordering.GREATER,
    Ordering.GREATER: Ordering.LESS,
    Ordering.EQUAL: Ordering.EQUAL,
    Ordering.UNDECIDED: Ordering.UNDECIDED,
}

Source = Union[int, Fraction, Enclosure, Callable[[int], ExactReal]]


def _at(source: Source, prec: int) -> ExactReal:
    if callable(source):
        return source(prec)
    if isinstance(source, int):
        return Fraction(source)
    return source


def compare(a: Source, b: Source, precision: Precision = Precision()) -> Ordering:
    """Order two reals, re-evaluating callables at doubling precision.

    Exact fractions compare exactly (possibly EQUAL). Enclosures only ever
    yield LESS or GREATER once they separate; if they still overlap at
    ``precision.max`` the answer is UNDECIDED.
    """
    for prec in precision.levels():
        x, y = _at(a, prec), _at(b, prec)
        if isinstance(x, Fraction) and isinstance(y, Fraction):
            return Ordering.LESS if x < y else Ordering.GREATER if x > y else Ordering.EQUAL
        ex, ey = to_enclosure(x, prec), to_enclosure(y, prec)
        if mpf_lt(ex.b, ey.a):
            return Ordering.LESS
        if mpf_lt(ey.b, ex.a):
            return Ordering.GREATER
        if not (callable(a) or callable(b)):
            break
    return Ordering.UNDECIDED


def decide(a: Source, b: Source, precision: Precision = Precision(), labels=("a", "b")) -> Ordering:
    """Like :func:`compare` but raise :class:`ComparisonError` when undecided."""
    result = compare(a, b, precision)
    if result is Ordering.UNDECIDED:
        raise ComparisonError(labels[0], labels[1], precision.max)
    return result

