"""Indexed access to the primes p_1 = 2, p_2 = 3, ...

A single process-wide table backs every lookup. It grows by doubling its
sieve bound, under a lock, so readers never see a half-built table.
"""

from __future__ import annotations

import bisect
import math
import threading

import numpy as np

__all__ = ["PrimeTable", "nth_prime", "primes_up_to", "prime_index", "sieve"]


def sieve(limit: int) -> list[int]:
    """All primes <= limit (sieve of Eratosthenes)."""
    if limit < 2:
        return []
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).tolist()


class PrimeTable:
    """Growing table of primes, 1-indexed through :meth:`nth`."""

    def __init__(self, limit: int = 4096):
        self._lock = threading.Lock()
        self.limit = max(2, int(limit))
        self.primes: tuple[int, ...] = tuple(sieve(self.limit))

    def _extend_to(self, limit: int) -> None:
        with self._lock:
            if limit <= self.limit:
                return
            new_limit = self.limit
            while new_limit < limit:
                new_limit *= 2
            primes = tuple(sieve(new_limit))
            # Publish the tuple before the bound: readers check the tuple.
            self.primes = primes
            self.limit = new_limit

    def nth(self, j: int) -> int:
        if j < 1:
            raise ValueError(f"prime index must be >= 1, got {j}")
        while len(self.primes) < j:
            self._extend_to(2 * self.limit)
        return self.primes[j - 1]

    def up_to(self, x: float) -> list[int]:
        bound = math.floor(x)
        if bound > self.limit:
            self._extend_to(bound)
        primes = self.primes
        return list(primes[: bisect.bisect_right(primes, bound)])

    def index(self, p: int) -> int:
        """Return j with p_j == p; ValueError if p is not prime."""
        if p > self.limit:
            self._extend_to(p)
        primes = self.primes
        i = bisect.bisect_left(primes, p)
        if i == len(primes) or primes[i] != p:
            raise ValueError(f"{p} is not prime")
        return i + 1


_TABLE = PrimeTable()


def nth_prime(j: int) -> int:
    """The j-th prime, with nth_prime(1) == 2."""
    return _TABLE.nth(j)


def primes_up_to(x: float) -> list[int]:
    return _TABLE.up_to(x)


def prime_index(p: int) -> int:
    return _TABLE.index(p)
