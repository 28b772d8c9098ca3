from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from diolab.arith import DomainError, QuadraticSurd, compare, parse_number
from diolab.contfrac import (
    CFExpansion, certify_badly_approximable, cf_expand, cf_expand_rational, cf_expand_surd, cf_value,
    convergents, diophantine_type_fit, norm_to_nearest,
)

PHI = QuadraticSurd.golden()
SQRT2 = QuadraticSurd.sqrt(2)


@pytest.mark.parametrize("r,terms", [(F(7, 5), (1, 2, 2)), (F(3), (3,)), (F(-1, 2), (-1, 2))])
def test_rational_expansions(r, terms):
    assert cf_expand_rational(r).preperiod == terms


@pytest.mark.parametrize("s,pre,per", [
    (SQRT2, (1,), (2,)),
    (QuadraticSurd.sqrt(3), (1,), (1, 2)),
])
def test_surd_expansions(s, pre, per):
    e = cf_expand_surd(s)
    assert (e.preperiod, e.period) == (pre, per)


def test_golden_expansion_is_all_ones():
    e = cf_expand_surd(PHI)
    assert e.head(12) == [1] * 12
    assert str(e) == "[(1)]"


def test_convergents():
    assert convergents(cf_expand(PHI), 5) == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]
    assert convergents(CFExpansion((3,)), 1) == [(3, 1)]
    assert convergents(cf_expand(SQRT2), 4) == [(1, 1), (3, 2), (7, 5), (17, 12)]


def test_canonical_last_term():
    # [..., a, 1] is folded into [..., a + 1]
    assert cf_expand_rational(F(3, 2)).preperiod == (1, 2)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=10**6))
def test_rational_reconstruction(r):
    e = cf_expand_rational(r)
    assert cf_value(e) == r
    if len(e.preperiod) > 1:
        assert e.preperiod[-1] >= 2


surds = st.builds(
    QuadraticSurd, st.integers(-30, 30), st.integers(1, 20), st.integers(1, 15), st.sampled_from([2, 3, 5, 6, 7, 13])
)


@given(surds)
def test_surd_reconstruction_and_convergent_errors(s):
    e = cf_expand_surd(s)
    assert cf_value(e) == s
    conv = convergents(e, 12)
    for k in range(len(conv) - 1):
        p, q = conv[k]
        q1 = conv[k + 1][1]
        assert compare(abs(s - F(p, q)), F(1, q * q1)) < 0
        # alternate sides
        sign = (-1) ** k
        assert compare((s - F(p, q)) * sign, 0) > 0


def test_certificates():
    assert certify_badly_approximable(PHI)[:2] == (1, F(1, 3))
    assert certify_badly_approximable(SQRT2)[:2] == (2, F(1, 4))
    with pytest.raises(DomainError):
        certify_badly_approximable(F(3, 7))


def test_noble_number_is_in_M1():
    # a number equivalent to the golden ratio: tail of ones after a prefix
    x = parse_number("(7+sqrt(5))/2")
    e = cf_expand_surd(x)
    assert e.period == (1,)
    assert certify_badly_approximable(x)[0] >= 1


@pytest.mark.parametrize("x", [PHI, SQRT2, QuadraticSurd.sqrt(7)])
def test_certificate_exhaustive(x):
    N, K, _ = certify_badly_approximable(x)
    for q in range(1, 1001):
        assert norm_to_nearest(q, x) * q >= K


def test_golden_certificate_against_convergents():
    conv = convergents(cf_expand(PHI), 40)
    for p, q in conv:
        assert compare(abs(PHI * q - p) * q, F(1, 3)) >= 0


def test_type_fit():
    f = diophantine_type_fit(SQRT2, 20)
    assert abs(float(f.v) - 1) < 0.05
    g = diophantine_type_fit(PHI, 20)
    assert abs(float(g.v) - 1) < 0.05 and g.K >= F(1, 3)
    liouville = CFExpansion((1, 2, 4, 16, 65536))
    assert diophantine_type_fit(liouville, 3).v > 2
