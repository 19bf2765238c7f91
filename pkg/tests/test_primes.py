import math
import threading

import pytest

from sigmaclosure.primes import PrimeTable, nth_prime, prime_index, primes_up_to, sieve

from conftest import trial_division_primes

REFERENCE = trial_division_primes(1200)


def test_first_primes():
    assert [nth_prime(j) for j in range(1, 11)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_nth_prime_matches_trial_division():
    assert [nth_prime(j) for j in range(1, len(REFERENCE) + 1)] == REFERENCE


def test_threshold_index_prime():
    # index where the next-prime bound kicks in; value from the reference list
    assert nth_prime(463) == REFERENCE[462] == 3299


def test_next_prime_bound_holds_past_threshold():
    # p_{j+1} <= (1 + 1/(2 log^2 p_j)) p_j for 463 <= j <= 10^4
    primes = primes_up_to(120_000)
    assert len(primes) > 10_001
    for j in range(463, 10_001):
        p, q = primes[j - 1], primes[j]
        assert q <= (1 + 1 / (2 * math.log(p) ** 2)) * p


def test_up_to_and_index_are_inverse():
    for j, p in enumerate(REFERENCE[:300], 1):
        assert prime_index(p) == j
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_up_to(1) == []
    assert primes_up_to(2) == [2]


@pytest.mark.parametrize("bad", [1, 4, 9, 3300])
def test_index_rejects_composites(bad):
    with pytest.raises(ValueError):
        prime_index(bad)


def test_nth_rejects_zero():
    with pytest.raises(ValueError):
        nth_prime(0)


def test_sieve_small_limits():
    assert sieve(0) == sieve(1) == []
    assert sieve(2) == [2]
    assert sieve(100) == [p for p in REFERENCE if p <= 100]


def test_table_grows_past_initial_limit():
    table = PrimeTable(limit=10)
    assert table.nth(1000) == REFERENCE[999]
    assert table.limit >= REFERENCE[999]
    assert table.index(REFERENCE[-1]) == len(REFERENCE)


def test_concurrent_growth_is_consistent():
    table = PrimeTable(limit=16)
    seen = []

    def worker(j):
        seen.append((j, table.nth(j)))

    threads = [threading.Thread(target=worker, args=(j,)) for j in range(100, 1200, 50)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(p == REFERENCE[j - 1] for j, p in seen)
