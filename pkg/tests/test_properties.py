from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from sigmaclosure.closure import closure, merge_intervals
from sigmaclosure.endpoints import INF, ClosedInterval, EndpointExpr, compare_exprs, expr_eval, parse_expr
from sigmaclosure.oracle import SpfTable, sigma_value
from sigmaclosure.primes import nth_prime
from sigmaclosure.realnum import Enclosure, Ordering, compare, pow_enclosure, zeta_enclosure
from sigmaclosure.scan import ScanRow, raster

from conftest import divisor_sigma, mp_in, mp_zeta

exponents = st.fractions(min_value=Fraction(11, 10), max_value=Fraction(6), max_denominator=1000)
precisions = st.sampled_from([64, 128, 256])
slow = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@slow
@given(j=st.integers(1, 200), r=exponents, prec=precisions)
def test_pow_refinement_nests(j, r, prec):
    p = nth_prime(j)
    coarse, fine = pow_enclosure(p, r, prec), pow_enclosure(p, r, 2 * prec)
    if isinstance(coarse, Fraction):
        assert coarse == fine
    else:
        lo, hi = fine.bounds()
        assert coarse.contains(lo) and coarse.contains(hi)


@slow
@given(r=exponents, prec=st.sampled_from([64, 128]))
def test_zeta_refinement_nests(r, prec):
    lo, hi = zeta_enclosure(r, 2 * prec).bounds()
    coarse = zeta_enclosure(r, prec)
    assert coarse.contains(lo) and coarse.contains(hi)


rationals = st.fractions(min_value=-10, max_value=10, max_denominator=10**6)


@given(a=rationals, b=rationals, w=st.fractions(0, Fraction(1, 100)))
def test_compare_antisymmetric(a, b, w):
    x = Enclosure.between(a, a + w, 64)
    y = Enclosure.between(b, b + w, 64)
    assert compare(x, y) is compare(y, x).flipped()
    assert compare(a, b) is compare(b, a).flipped()


@settings(max_examples=200)
@given(n=st.integers(1, 50_000), r=st.integers(1, 5))
def test_sigma_multiplicative_equals_divisor_sum(n, r):
    assert sigma_value(n, r, TABLE) == divisor_sigma(n, r)


TABLE = SpfTable(50_000)

factors = st.dictionaries(st.integers(1, 30), st.one_of(st.integers(1, 6), st.just(INF)), max_size=4)


@st.composite
def exprs(draw):
    tail = draw(st.one_of(st.none(), st.integers(0, 40)))
    items = draw(factors)
    return EndpointExpr.of(*sorted(items.items()), tail=tail)


@given(e=exprs())
def test_render_parse_round_trip(e):
    assert parse_expr(e.render()) == e


@given(a=exprs(), b=exprs())
def test_integer_r_ordering_agrees_with_enclosures(a, b):
    r = Fraction(3)
    c = compare_exprs(a, b, r)
    assert c is compare_exprs(b, a, r).flipped()
    if c is not Ordering.EQUAL:
        ea, eb = expr_eval(a, r, 256), expr_eval(b, r, 256)
        numeric = compare(ea, eb)
        assert numeric in (c, Ordering.UNDECIDED)


finite_factor = st.tuples(st.integers(1, 6), st.integers(0, 3))


@st.composite
def rational_intervals(draw):
    """Intervals with finite sigma endpoints, exact at r = 2."""
    lo = dict(draw(st.lists(finite_factor, max_size=3, unique_by=lambda t: t[0])))
    extra = draw(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 3)), min_size=1, max_size=3,
                          unique_by=lambda t: t[0]))
    hi = dict(lo)
    for j, a in extra:
        hi[j] = hi.get(j, 0) + a
    return ClosedInterval(EndpointExpr.of(*lo.items()), EndpointExpr.of(*hi.items()))


@settings(max_examples=150)
@given(pieces=st.lists(rational_intervals(), min_size=1, max_size=8))
def test_merge_matches_exact_sweep(pieces):
    r = Fraction(2)
    components, membership = merge_intervals(pieces, r)
    values = sorted((expr_eval(p.lo, r, 64), expr_eval(p.hi, r, 64)) for p in pieces)
    expected = []
    for lo, hi in values:
        if expected and lo <= expected[-1][1]:
            expected[-1][1] = max(expected[-1][1], hi)
        else:
            expected.append([lo, hi])
    got = [[expr_eval(c.lo, r, 64), expr_eval(c.hi, r, 64)] for c in components]
    assert got == expected
    for piece, k in zip(pieces, membership):
        lo, hi = got[k]
        assert lo <= expr_eval(piece.lo, r, 64) and expr_eval(piece.hi, r, 64) <= hi


@settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(r=st.fractions(min_value=Fraction(105, 100), max_value=Fraction(4), max_denominator=200))
def test_closure_invariants(r):
    res = closure(r)
    assert sum(res.densities) == 1 and all(d > 0 for d in res.densities)
    assert res.intervals[0].lo == EndpointExpr.one()
    for left, right in zip(res.intervals, res.intervals[1:]):
        assert compare_exprs(left.hi, right.lo, r) is Ordering.LESS
    assert mp_in(res.intervals[-1].enclosures(r, 128)[1], mp_zeta(r))


@given(segments=st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), max_size=4))
def test_one_pixel_raster_is_centre_membership(segments):
    ends = [x for lo, hi in segments for x in sorted((lo, hi))]
    row = ScanRow("2", len(segments), ends)
    black = any(lo <= 0.5 <= hi for lo, hi in row.segments)
    assert raster([row], 1)[0, 0] == (0 if black else 255)
