import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from diolab.arith import CPoint, DomainError, GaussianInt, reduce
from diolab.resonant import (
    DiscRaster, count_by_definition, gauss_circle_count, lattice_count_below, neighborhood_measure,
    normalized_denominators, resonant_set, shell_counts, small_denominator_measure, ubiquity_coverage,
)


def test_resonant_examples():
    assert len(resonant_set(GaussianInt(5, 3))) == 34
    assert resonant_set(1).points() == [CPoint(0, 0)]
    pts = set(resonant_set(2).points())
    assert pts == {CPoint(0, 0), CPoint(F(1, 2), 0), CPoint(0, F(1, 2)), CPoint(F(1, 2), F(1, 2))}
    with pytest.raises(DomainError):
        resonant_set(0)


@settings(max_examples=60)
@given(st.integers(-40, 40), st.integers(-40, 40))
def test_resonant_set_is_the_definition(a, b):
    q = GaussianInt(a, b)
    if q.is_zero():
        return
    rs = resonant_set(q)
    pts = rs.points()
    assert len(pts) == len(set(pts)) == q.norm() == count_by_definition(q)
    for z in pts:
        assert 0 <= z.re < 1 and 0 <= z.im < 1
        w = z * CPoint.of(q)
        # z q must be a Gaussian integer
        assert w.re.denominator == 1 and w.im.denominator == 1


def _norms(k):
    return [a * a + b * b for a in range(-k, k + 1) for b in range(-k, k + 1)]


def test_gauss_circle_examples():
    assert gauss_circle_count(1) == 4
    assert gauss_circle_count(5) == sum(1 for n in _norms(5) if 0 < n <= 25) == 80
    assert abs(gauss_circle_count(100) - math.pi * 100**2) <= 1000
    norms = _norms(8)
    for m in range(0, 60):
        assert lattice_count_below(m) == sum(1 for n in norms if n < m)


def test_shell_counts():
    s = shell_counts(500)
    norms = _norms(40)
    for k in range(40):
        assert s[k] == sum(1 for n in norms if k * k <= n < (k + 1) ** 2)
    for k in range(1, 500):
        assert abs(s[k] - 2 * math.pi * k) <= 10 * k ** (2 / 3) + 16


def test_normalized_denominators_pick_one_associate():
    pairs = normalized_denominators(1, 50, strict_hi=False).tolist()
    assert all(a > 0 and b >= 0 for a, b in pairs)
    assert 4 * len(pairs) == sum(1 for n in _norms(8) if 0 < n <= 50)
    norms = [a * a + b * b for a, b in pairs]
    assert norms == sorted(norms)


def test_single_disc_area():
    m = neighborhood_measure(1, F(1, 4), 512)
    assert m.inner <= F(math.pi / 16) <= m.outer


def test_no_overlap_regime():
    q = GaussianInt(5, 3)
    eps = F(1, 100)
    m = neighborhood_measure(q, eps, 1024)
    area = math.pi * float(eps) ** 2 * 34
    assert 0.9 * area <= float(m.estimate) <= 1.1 * area
    assert m.inner <= F(area) <= m.outer


def test_large_eps_covers_square():
    q = GaussianInt(5, 3)
    m = neighborhood_measure(q, F(1, 5), 256)  # 1/5 > 1/|q|
    assert m.inner == 1


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.fractions(min_value=F(1, 200), max_value=F(1, 20)))
def test_measure_monotone_in_eps(a, b, eps):
    q = GaussianInt(a, b)
    m1 = neighborhood_measure(q, eps, 128)
    m2 = neighborhood_measure(q, eps * 2, 128)
    assert m1.inner <= m2.inner and m1.outer <= m2.outer


def test_resolution_doubling_tightens():
    gaps = [small_denominator_measure(64, r) for r in (128, 256, 512)]
    w = [g.outer - g.inner for g in gaps]
    assert w[0] > w[1] > w[2]


def test_small_denominators_decrease():
    est = [small_denominator_measure(N, 256).estimate for N in (8, 32, 64)]
    assert est[0] > est[1] > est[2]


def test_coverage_small_N():
    c = ubiquity_coverage(8, resolution=256)
    c10 = ubiquity_coverage(8, resolution=256, rho_scale=10)
    assert c10.covered_fraction >= c.covered_fraction
    s = small_denominator_measure(8, 256)
    # the complement is inside S(N), up to grid slack
    assert 1 - c.covered_fraction <= s.outer + F(1, 100)
    assert c.covered_fraction > F(99, 100)


def test_raster_sandwich_contains_exact_area():
    ras = DiscRaster(256)
    import numpy as np
    ras.add(np.array([0.5]), np.array([0.5]), np.array([0.3]))
    b = ras.bounds()
    assert b.inner <= F(math.pi * 0.09) <= b.outer
