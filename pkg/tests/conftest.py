"""Shared fixtures and independent reference implementations.

Nothing here calls into the package's numerics: primes come from trial
division, sigma from enumerating divisors, zeta from mpmath.zeta or from an
exact partial-sum bracket.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest

from sigmaclosure import closure

VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[VERDICTS] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def verdict(request):
    """``verdict(label, ok, detail)`` records one PASS/FAIL line and asserts."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
        request.config.stash[VERDICTS].append(line)
        print(line)
        assert ok, line

    return record


def trial_division_primes(count: int) -> list[int]:
    out: list[int] = []
    n = 2
    while len(out) < count:
        if all(n % p for p in out if p * p <= n):
            out.append(n)
        n += 1
    return out


def divisor_sigma(n: int, r: int) -> Fraction:
    """sum_{d | n} d^-r by enumerating divisors."""
    total = Fraction(0)
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            total += Fraction(1, d**r)
            if d * d != n:
                total += Fraction(1, (n // d) ** r)
    return total


def mp_zeta(r: Fraction, dps: int = 60) -> mpmath.mpf:
    with mpmath.workdps(dps):
        return mpmath.zeta(mpmath.mpf(r.numerator) / r.denominator)


def partial_sum_bracket(r: int, terms: int) -> tuple[Fraction, Fraction]:
    """Exact bracket of zeta(r) from sum_{n<=N} n^-r and the integral test."""
    s = sum(Fraction(1, n**r) for n in range(1, terms + 1))
    lower = s + Fraction(1, (r - 1) * (terms + 1) ** (r - 1))
    upper = s + Fraction(1, (r - 1) * terms ** (r - 1))
    return lower, upper


def mp_in(enclosure, value) -> bool:
    """Is the mpmath number inside the enclosure (checked in exact arithmetic)?"""
    lo, hi = enclosure.bounds()
    return lo <= mp_fraction(value) <= hi


def mp_fraction(value) -> Fraction:
    if not isinstance(value, mpmath.mpf):
        value = mpmath.mpf(value)
    man, exp = value.man_exp
    return Fraction(man) * Fraction(2) ** exp


@pytest.fixture(scope="session")
def result_r2():
    return closure("2")
