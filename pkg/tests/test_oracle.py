import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from sigmaclosure.closure import closure
from sigmaclosure.endpoints import parse_expr
from sigmaclosure.oracle import (
    DensityReport,
    SpfTable,
    classify,
    empirical_densities,
    eta_sign,
    eta_solve,
    gap_violations,
    sigma_expr,
    sigma_value,
    sigma_values,
)
from sigmaclosure.realnum import RangeError

from conftest import divisor_sigma, mp_fraction, mp_in


def smallest_factor(n: int) -> int:
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


class TestSpf:
    def test_against_trial_division(self):
        table = SpfTable(5000)
        assert all(table.spf[n] == smallest_factor(n) for n in range(2, 5001))

    def test_factorize(self):
        table = SpfTable(1000)
        assert table.factorize(1) == []
        assert table.factorize(360) == [(2, 3), (3, 2), (5, 1)]
        assert table.factorize(997) == [(997, 1)]
        with pytest.raises(ValueError):
            table.factorize(1001)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            SpfTable(0)


class TestSigma:
    @pytest.mark.parametrize("n, value", [(1, Fraction(1)), (6, Fraction(25, 18)), (4, Fraction(21, 16))])
    def test_small(self, n, value):
        assert sigma_value(n, 2) == value

    def test_multiplicative_matches_divisor_sum(self):
        rng = random.Random(7)
        table = SpfTable(10**5)
        for n in rng.sample(range(1, 10**5), 1000):
            r = rng.randint(1, 4)
            assert sigma_value(n, r, table) == divisor_sigma(n, r)

    def test_fractional_r_enclosure(self):
        value = sigma_value(12, Fraction(3, 2))
        with mpmath.workdps(50):
            ref = sum(mpmath.mpf(d) ** -1.5 for d in (1, 2, 3, 4, 6, 12))
        assert mp_in(value, ref)

    def test_symbolic_form(self):
        assert sigma_expr(12).render() == "sigma(2^2)*sigma(3^1)"
        assert sigma_expr(1).render() == "1"

    def test_float_sieve(self):
        vals = sigma_values(2000, 3)
        exact = [float(divisor_sigma(n, 3)) for n in range(1, 2001)]
        np.testing.assert_allclose(vals[1:], exact, rtol=1e-14)
        assert np.isnan(vals[0])


class TestClassify:
    def test_r2_small_n_against_exact_classification(self, result_r2):
        limit = 20_000
        report = classify(2, limit, result_r2.intervals)
        with mpmath.workdps(50):
            pi2 = mp_fraction(mpmath.pi**2)
        bounds = [(Fraction(1), pi2 / 9), (Fraction(10, 9), pi2 / 8), (Fraction(5, 4), pi2 / 6)]
        counts = [0, 0, 0]
        for n in range(1, limit + 1):
            v = divisor_sigma(n, 2)
            hits = [k for k, (lo, hi) in enumerate(bounds) if lo <= v <= hi]
            assert len(hits) == 1, n
            counts[hits[0]] += 1
        assert report.counts == counts
        assert report.unclassified == 0 and report.violations == []

    def test_limit_one(self, result_r2):
        report = empirical_densities(2, 1, result_r2.intervals)
        assert report.counts == [1, 0, 0] and report.ok

    def test_single_full_interval_never_violated(self):
        res = closure("1.8")
        assert gap_violations("1.8", 10_000, res.intervals) == []

    def test_sabotage_reports_n_equals_two(self, result_r2):
        third = result_r2.intervals[2]
        intervals = list(result_r2.intervals[:2]) + [(Fraction(13, 10), third.hi)]
        bad = gap_violations(2, 1000, intervals)
        assert 2 in bad
        assert all(Fraction(5, 4) <= divisor_sigma(n, 2) < Fraction(13, 10) for n in bad)

    def test_rational_pairs_accepted(self):
        report = classify(2, 100, [("1", "T_2"), (parse_expr("sigma(3^1)"), parse_expr("sigma(3^inf)*T_2")),
                                   ("5/4", parse_expr("T_0"))])
        assert report.ok and sum(report.counts) == 100

    def test_invariant(self, result_r2):
        report = classify(2, 5000, result_r2.intervals[:2])
        assert sum(report.counts) + report.unclassified + len(report.violations) == 5000
        assert not report.ok

    def test_fractional_r(self):
        res = closure("2.5")
        report = classify("2.5", 50_000, res.intervals)
        assert report.ok and report.unclassified == 0

    def test_limit_bounds(self, result_r2):
        with pytest.raises(ValueError):
            classify(2, 0, result_r2.intervals)

    def test_density_report_properties(self):
        report = DensityReport(10, [5, 5])
        assert report.densities == [0.5, 0.5] and report.ok


class TestEta:
    def test_endpoint_signs(self):
        # at s = 2: 4/3 * 10/8 = 5/3 > zeta(2); at s = 3/2 the left side is smaller
        assert eta_sign(2) == 1
        assert eta_sign("1.5") == -1

    def test_solve(self):
        bracket = eta_solve(1e-6)
        lo, hi = bracket.bounds()
        assert hi - lo <= Fraction(1, 10**6)
        assert lo <= Fraction("1.8877909") <= hi
        assert eta_sign(lo) == -1 and eta_sign(hi) == 1

    def test_coarse_bracket_nests(self):
        fine_lo, fine_hi = eta_solve(1e-6).bounds()
        lo, hi = eta_solve(0.1).bounds()
        assert lo <= fine_lo and fine_hi <= hi

    def test_against_mpmath_root(self):
        with mpmath.workdps(30):
            f = lambda s: 2**s / (2**s - 1) * (3**s + 1) / (3**s - 1) - mpmath.zeta(s)
            root = mp_fraction(mpmath.findroot(f, 1.88))
        lo, hi = eta_solve(1e-8).bounds()
        assert lo <= root <= hi

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            eta_solve(0)
        with pytest.raises(RangeError):
            eta_solve(1e-3, lo="1.9", hi="2")
