import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from diolab.arith import CPoint, GaussianInt, QuadraticSurd, compare, nearest_gaussian
from diolab.contfrac import certify_badly_approximable
from diolab.dirichlet import (
    _complex_dirichlet_slow, complex_dirichlet, complex_dirichlet_multiples, hurwitz_stream, pigeonhole_pair,
    real_dirichlet, simultaneous_dirichlet,
)

PHI = QuadraticSurd.golden()
SQRT2 = QuadraticSurd.sqrt(2)


def test_real_examples():
    a = real_dirichlet(SQRT2, 5)
    assert (a.p, a.q) == (7, 5) and a.error < F(1, 25)
    a = real_dirichlet(F(1, 3), 3)
    assert (a.p, a.q, a.error) == (1, 3, 0)
    a = real_dirichlet(PHI, 8)
    assert (a.p, a.q) == (13, 8)


@given(st.fractions(min_value=-5, max_value=5, max_denominator=10**4), st.integers(1, 200))
def test_real_two_sided_chain(alpha, N):
    a = real_dirichlet(alpha, N)
    assert 1 <= a.q <= N
    assert abs(alpha - F(a.p, a.q)) == a.error < F(1, a.q * N) <= F(1, a.q * a.q)


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**4), st.integers(1, 100))
def test_pigeonhole_pair_meets_the_bound(alpha, N):
    p, q = pigeonhole_pair(alpha, N)
    assert 1 <= q <= N
    assert abs(q * alpha - p) < F(1, N)


def test_badly_approximable_cross_check():
    for x in (PHI, SQRT2):
        _, K, _ = certify_badly_approximable(x)
        for q in range(1, 1001):
            p = math.floor(x * q + F(1, 2))
            assert compare(abs(x - F(p, q)) * q * q, K) >= 0


def test_simultaneous():
    a = simultaneous_dirichlet([SQRT2, QuadraticSurd.sqrt(3)], 10)
    assert a.q <= 10
    for x, p in zip((SQRT2, QuadraticSurd.sqrt(3)), a.p):
        err = abs(x - F(p, a.q))
        # max error < 1/(q sqrt 10), squared to stay exact
        assert compare(err * err * a.q * a.q * 10, 1) < 0
    b = simultaneous_dirichlet([F(1, 6), F(5, 6)], 7)
    assert (b.q, b.error) == (6, 0)
    for alpha in (SQRT2, F(3, 11), PHI):
        r, s = real_dirichlet(alpha, 20), simultaneous_dirichlet([alpha], 20)
        assert (r.p, r.q) == (s.p[0], s.q)


def test_complex_examples():
    a = complex_dirichlet(CPoint(F(1, 2), F(1, 2)), 2)
    assert (a.q, a.p, a.error) == (GaussianInt(1, 1), GaussianInt(0, 1), 0)
    a = complex_dirichlet(CPoint(0, 0), 9)
    assert (a.q, a.p) == (GaussianInt(1, 0), GaussianInt(0, 0))
    z = CPoint(F(7, 10), F(2, 5))
    a = complex_dirichlet(z, 6)
    assert 0 < a.q.norm() <= 36
    assert a.error * a.error * a.q.norm() * 36 < 4


def _check_complex(z, N, a):
    n = a.q.norm()
    assert a.q.re > 0 and a.q.im >= 0 and 0 < n <= N * N
    r2 = (z - CPoint.of(a.p) / CPoint.of(a.q)).norm2()
    # exact error < 2/(|q| N)
    assert r2 * n * N * N < 4
    assert a.error < a.bound


@settings(max_examples=200)
@given(
    st.fractions(min_value=0, max_value=1, max_denominator=500),
    st.fractions(min_value=0, max_value=1, max_denominator=500),
    st.integers(2, 30),
)
def test_complex_bound_and_fast_path_agree(x, y, N):
    z = CPoint(x, y)
    a = complex_dirichlet(z, N)
    _check_complex(z, N, a)
    assert (a.q, a.p) == _complex_dirichlet_slow(z, N)


def test_complex_ties_prefer_small_norm():
    # q = 1 already hits z exactly, no larger q may win
    a = complex_dirichlet(CPoint(F(1), F(2)), 10)
    assert a.q == GaussianInt(1, 0)


def test_multiples_flag():
    z = CPoint(F(1, 3), F(1, 5))
    a = complex_dirichlet(z, 12)
    for m in complex_dirichlet_multiples(z, 12, a):
        _check_complex(z, 12, m)
        assert m.q.norm() > a.q.norm()


def test_hurwitz_stream():
    got = list(hurwitz_stream(PHI, 3))
    assert len(got) == 3
    for p, q in got:
        d = PHI - F(p, q)
        assert compare(d * d * 5 * q**4, 1) < 0
    got2 = list(hurwitz_stream(SQRT2, 3))
    assert len(got2) == 3
    for p, q in got2:
        d = SQRT2 - F(p, q)
        assert compare(d * d * 5 * q**4, 1) < 0 and compare(abs(d) * q * q, 1) < 0
