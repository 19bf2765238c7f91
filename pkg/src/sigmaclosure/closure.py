"""Closure of the value set of sigma_{-r} as a finite union of intervals.

The computation runs from the level ``j0`` (integers with no prime factor
<= p_j0, whose values fill a single interval) back down to level 0 (all
positive integers). Each step adjoins the prime p_j: every interval is
copied at the scales sigma(p_j^a), the copies are merged into connected
components, and the component densities are propagated as exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Sequence, Union

from .endpoints import (
    INF,
    ClosedInterval,
    EndpointExpr,
    SigmaFactor,
    decide_exprs,
)
from .primes import nth_prime, primes_up_to
from .realnum import (
    ComparisonError,
    Enclosure,
    Ordering,
    Precision,
    RangeError,
    decide,
    parse_real,
)

__all__ = [
    "ClosureError",
    "ComparisonError",
    "ClosureResult",
    "DomainError",
    "LevelState",
    "base_level",
    "closure",
    "compute_j0",
    "cutoff_exponent",
    "expand_interval",
    "find_jprime",
    "merge_intervals",
    "step_down",
    "validate_level",
]

PRIME_GAP_INDEX = 463
CUTOFF_CAP = 10**6
MAX_PRIME_BOUND = 10**8

_LE = (Ordering.LESS, Ordering.EQUAL)


class DomainError(ValueError):
    """The exponent r is not > 1."""


class ClosureError(RuntimeError):
    """An internal invariant of the recursion failed."""


@dataclass(frozen=True)
class LevelState:
    """Components of the closure at level j with their densities.

    ``cutoffs`` holds the cutoff exponent used for each interval of the
    previous (higher) level when this state was produced by :func:`step_down`.
    """

    level: int
    intervals: tuple[ClosedInterval, ...]
    densities: tuple[Fraction, ...]
    cutoffs: tuple[int, ...] = ()

    @property
    def ell(self) -> int:
        return len(self.intervals)


@dataclass(frozen=True)
class ClosureResult:
    r: Fraction
    j_prime: int
    j0: int
    final: LevelState
    precision: Precision
    levels: tuple[LevelState, ...] = field(default=(), repr=False)

    @property
    def ell(self) -> int:
        return self.final.ell

    @property
    def intervals(self) -> tuple[ClosedInterval, ...]:
        return self.final.intervals

    @property
    def densities(self) -> tuple[Fraction, ...]:
        return self.final.densities

    def level(self, j: int) -> LevelState:
        return self.levels[self.j0 - j]


def _as_exponent(r) -> Fraction:
    r = parse_real(r)
    if r <= 1:
        raise DomainError(f"r must be > 1, got {r}")
    return r


def _ratio_ok(p: int, q: int, r: Fraction, precision: Precision) -> bool:
    """Decide ``q <= 2**(1/r) * p`` for consecutive primes p < q."""
    u, v = r.numerator, r.denominator
    if u * q.bit_length() <= 1 << 16:
        # q^u <= 2^v p^u, exact
        return q**u <= (p**u) << v
    rr = Fraction(r)

    def lhs(prec):
        return Enclosure.exact(rr, prec) * (Enclosure.exact(Fraction(q, p), prec)).log()

    def rhs(prec):
        return Enclosure.exact(2, prec).log()

    # equality would need q^u = 2^v p^u, impossible for odd q
    return decide(lhs, rhs, precision, (f"{rr}*log({q}/{p})", "log(2)")) is Ordering.LESS


def _prime_gap_index(r: Fraction, precision: Precision) -> int:
    """Index beyond which the explicit prime-gap bound already gives p_{j+1} <= 2^(1/r) p_j."""
    prec = precision.base
    rr = Enclosure.exact(r, prec)
    two_root = (Enclosure.exact(2, prec).log() / rr).exp()
    x = (1 / (2 * (two_root - 1))).sqrt().exp()
    bound = math.ceil(x.float_bounds()[1])
    if bound > MAX_PRIME_BOUND:
        raise RangeError(f"r = {r} needs primes beyond {MAX_PRIME_BOUND}")
    first = len(primes_up_to(bound - 1)) + 1 if bound > 2 else 1
    return max(PRIME_GAP_INDEX, first)


@lru_cache(maxsize=1024)
def _find_jprime(r: Fraction, precision: Precision) -> int:
    bound = _prime_gap_index(r, precision)
    j_prime = 1
    for j in range(1, bound + 1):
        if not _ratio_ok(nth_prime(j), nth_prime(j + 1), r, precision):
            j_prime = j + 1
    return j_prime


def find_jprime(r, precision: Precision = Precision()) -> int:
    """Least j' with p_{j+1} <= 2^(1/r) p_j for every j >= j'."""
    return _find_jprime(_as_exponent(r), precision)


def compute_j0(r, precision: Precision = Precision(), j_prime: int | None = None) -> int:
    """Largest j < j' with T_j < 1 + p_j^-r, or 0 if there is none."""
    r = _as_exponent(r)
    if j_prime is None:
        j_prime = find_jprime(r, precision)
    j0 = 0
    for j in range(1, j_prime):
        tail = EndpointExpr.tail_only(j)
        one_plus = EndpointExpr.of((j, 1))
        if decide_exprs(tail, one_plus, r, precision) is Ordering.LESS:
            j0 = j
    return j0


def base_level(r, j0: int) -> LevelState:
    """The single interval [1, T_j0] with density prod_{k<=j0} (1 - 1/p_k)."""
    density = Fraction(1)
    for k in range(1, j0 + 1):
        density *= 1 - Fraction(1, nth_prime(k))
    interval = ClosedInterval(EndpointExpr.one(), EndpointExpr.tail_only(j0))
    return LevelState(j0, (interval,), (density,))


def cutoff_exponent(j: int, interval: ClosedInterval, r, precision: Precision = Precision()) -> int:
    """Least a >= 0 with sigma(p_j^(a+1)) / sigma(p_j^a) <= hi / lo.

    Compared in cross-multiplied form ``sigma(p^(a+1)) lo <= sigma(p^a) hi``
    so both sides stay symbolic; an exact tie satisfies the bound.
    """
    r = _as_exponent(r)
    for a in range(CUTOFF_CAP):
        left = interval.lo.mul(SigmaFactor(j, a + 1))
        right = interval.hi.mul(SigmaFactor(j, a))
        if decide_exprs(left, right, r, precision) in _LE:
            return a
    raise ClosureError(f"cutoff exponent for p_{j} on {interval.render()} exceeds {CUTOFF_CAP}")


def expand_interval(j: int, interval: ClosedInterval, r, precision: Precision = Precision()) -> list[ClosedInterval]:
    """Pairwise disjoint J_0..J_a0 whose union is all sigma(p_j^a)-multiples of the interval."""
    r = _as_exponent(r)
    a0 = cutoff_exponent(j, interval, r, precision)
    pieces = [interval.scaled(SigmaFactor(j, a), SigmaFactor(j, a)) for a in range(a0)]
    pieces.append(interval.scaled(SigmaFactor(j, a0), SigmaFactor(j, INF)))
    for left, right in zip(pieces, pieces[1:]):
        if decide_exprs(left.hi, right.lo, r, precision) is not Ordering.LESS:
            raise ClosureError(f"pieces {left.render()} and {right.render()} are not disjoint")
    return pieces


def merge_intervals(
    intervals: Sequence[ClosedInterval], r, precision: Precision = Precision()
) -> tuple[list[ClosedInterval], list[int]]:
    """Connected components of a union of closed intervals.

    Returns the components sorted by left endpoint and, for every input
    interval, the index of the component containing it. Touching intervals
    belong to one component.
    """
    r = _as_exponent(r)

    def by_lo(i: int, k: int) -> int:
        c = decide_exprs(intervals[i].lo, intervals[k].lo, r, precision)
        return -1 if c is Ordering.LESS else 1 if c is Ordering.GREATER else 0

    order = sorted(range(len(intervals)), key=cmp_to_key(by_lo))
    bounds: list[list[EndpointExpr]] = []
    membership = [0] * len(intervals)
    for i in order:
        piece = intervals[i]
        if bounds and decide_exprs(piece.lo, bounds[-1][1], r, precision) in _LE:
            if decide_exprs(piece.hi, bounds[-1][1], r, precision) is Ordering.GREATER:
                bounds[-1][1] = piece.hi
        else:
            bounds.append([piece.lo, piece.hi])
        membership[i] = len(bounds) - 1
    return [ClosedInterval(lo, hi) for lo, hi in bounds], membership


def step_down(state: LevelState, r, precision: Precision = Precision()) -> LevelState:
    """Adjoin the prime p_j to go from level j to level j - 1."""
    r = _as_exponent(r)
    j = state.level
    if j < 1:
        raise ValueError("level 0 is the last level")
    p = nth_prime(j)
    pieces: list[ClosedInterval] = []
    owners: list[tuple[int, int, int]] = []
    cutoffs = []
    for k, interval in enumerate(state.intervals):
        expanded = expand_interval(j, interval, r, precision)
        a0 = len(expanded) - 1
        cutoffs.append(a0)
        for a, piece in enumerate(expanded):
            pieces.append(piece)
            owners.append((k, a, a0))
    components, membership = merge_intervals(pieces, r, precision)
    densities = [Fraction(0)] * len(components)
    for (k, a, a0), h in zip(owners, membership):
        if a < a0:
            weight = Fraction(1, p**a)
        else:
            # geometric tail sum_{b >= a0} p^-b
            weight = 1 / (Fraction(p) ** (a0 - 1) * (p - 1))
        densities[h] += state.densities[k] * weight
    return LevelState(j - 1, tuple(components), tuple(densities), tuple(cutoffs))


def validate_level(state: LevelState, r, precision: Precision = Precision()) -> None:
    """Raise :class:`ClosureError` unless the state satisfies its invariants."""
    r = _as_exponent(r)
    if len(state.intervals) != len(state.densities) or not state.intervals:
        raise ClosureError("intervals and densities misaligned")
    for interval in state.intervals:
        if decide_exprs(interval.lo, interval.hi, r, precision) is not Ordering.LESS:
            raise ClosureError(f"degenerate interval {interval.render()}")
    for left, right in zip(state.intervals, state.intervals[1:]):
        if decide_exprs(left.hi, right.lo, r, precision) is not Ordering.LESS:
            raise ClosureError(f"{left.render()} and {right.render()} not separated")
    if any(d <= 0 for d in state.densities):
        raise ClosureError("non-positive density")
    expected = Fraction(1)
    for k in range(1, state.level + 1):
        expected *= 1 - Fraction(1, nth_prime(k))
    if sum(state.densities) != expected:
        raise ClosureError(f"densities sum to {sum(state.densities)}, expected {expected}")
    if state.intervals[0].lo != EndpointExpr.one():
        raise ClosureError("first interval does not start at 1")


def closure(r: Union[str, int, Fraction], precision: Precision = Precision()) -> ClosureResult:
    """Closure of sigma_{-r}(N+) with exact densities."""
    r = _as_exponent(r)
    j_prime = find_jprime(r, precision)
    j0 = compute_j0(r, precision, j_prime)
    state = base_level(r, j0)
    validate_level(state, r, precision)
    levels = [state]
    while state.level > 0:
        state = step_down(state, r, precision)
        validate_level(state, r, precision)
        levels.append(state)
    if sum(state.densities) != 1:
        raise ClosureError("level-0 densities do not sum to 1")
    return ClosureResult(r, j_prime, j0, state, precision, tuple(levels))

