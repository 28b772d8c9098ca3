import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from diolab.arith import CPoint, DomainError, parse_number
from diolab.audit import (
    additive_type_audit, fit_exponent, fourier_decay_bound, kam_frequency_audit, multiplicative_type_audit,
    pde_ratio_audit, rotation_audit,
)
from diolab.contfrac import certify_badly_approximable, norm_to_nearest
from diolab.dimlab import Kind, LimsupSetDescriptor, closed_form_dimension

PHI = parse_number("(1+sqrt(5))/2")
SQRT2 = parse_number("sqrt(2)")


def test_pde_small_denominator_resonance():
    rep = pde_ratio_audit(CPoint(F(1, 2), F(1, 2)), 10)
    assert rep.K_observed == 0 and rep.exact_resonance
    (q, p) = rep.worst_witness
    assert (p[0] + p[1] * 1j) / (q[0] + q[1] * 1j) == pytest.approx(0.5 + 0.5j)


def test_pde_ford_point():
    z = (F(1, 2), parse_number("sqrt(3)/2"))
    rep = pde_ratio_audit(z, 200)
    # q = 1 already gives |z - (1+i)| = 0.5176, just below 1/sqrt3
    assert rep.K_value >= 1 / math.sqrt(3) - 0.06
    assert rep.K_observed > 0 and not rep.exact_resonance
    assert rep.exceptional_dimension == F(2)


def test_pde_dimension_and_domain():
    rep = pde_ratio_audit(CPoint(F(1, 3), F(2, 7)), 20, 3)
    assert rep.exceptional_dimension == F(1)
    with pytest.raises(DomainError):
        pde_ratio_audit(CPoint(0, 0), 10, F(1, 2))


def test_pde_huge_denominator():
    rnd = random.Random(11)
    for _ in range(3):
        den = rnd.randint(10**6, 10**7)
        z = CPoint(F(rnd.randint(1, den), den), F(rnd.randint(1, den), den))
        rep = pde_ratio_audit(z, 30)
        assert rep.K_observed > 0 and not rep.exact_resonance


def test_rotation_examples():
    rep = rotation_audit(PHI, 1000, 1)
    assert rep.K_observed >= F(1, 3)
    assert rotation_audit(F(3, 7), 7).K_observed == 0
    assert rotation_audit(F(3, 7), 6).K_observed > 0
    rep = rotation_audit(SQRT2, 1000, 2)
    assert rep.K_observed > 0
    # brute force over the same range
    brute = min(float(norm_to_nearest(k, SQRT2)) * k * k for k in range(1, 1001))
    assert rep.K_value == pytest.approx(brute, rel=1e-12)
    assert rep.exceptional_dimension == F(2, 3)


@pytest.mark.parametrize("x", ["(1+sqrt(5))/2", "sqrt(2)", "sqrt(7)", "(3+sqrt(13))/2", "sqrt(3)/5"])
def test_rotation_at_least_the_certificate(x):
    _, K, _ = certify_badly_approximable(x)
    assert rotation_audit(parse_number(x), 2000).K_observed >= K


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 300), st.integers(1, 300))
def test_rotation_nonincreasing_in_J(J, extra):
    a = rotation_audit(SQRT2, J).K_observed
    b = rotation_audit(SQRT2, J + extra).K_observed
    assert b <= a


def test_multiplicative_examples():
    lam = CPoint(F(3, 5), F(4, 5))
    rep = multiplicative_type_audit([lam, lam * lam], 4, 1)
    assert rep.K_observed == 0 and rep.exact_resonance
    assert rep.exceptional_dimension == F(7, 2)
    for v in (1, 2, F(1, 2)):
        rep = multiplicative_type_audit([F(2)], 8, v)
        assert rep.worst_witness == (1, (2,))
        assert rep.K_value == pytest.approx(2 ** (float(v) + 1))
    rep = multiplicative_type_audit([CPoint(F(1, 2), F(1, 3)), CPoint(F(1, 5), F(2, 3))], 3, F(3, 2))
    assert rep.exceptional_dimension == F(16, 5)
    with pytest.raises(DomainError):
        multiplicative_type_audit([F(1, 2)] * 5, 3, 1)


def test_additive_examples():
    rep = additive_type_audit([F(1), F(2)], 10, 1)
    assert rep.K_observed == 0 and rep.exact_resonance
    rep = additive_type_audit([F(1), PHI], 1000, 1)
    assert rep.K_observed > 0 and not rep.exact_resonance
    assert additive_type_audit([F(1), PHI], 30, 3).exceptional_dimension == F(3, 2)


def test_kam_examples():
    rep = kam_frequency_audit([F(1), F(1)], 10, 1)
    assert rep.K_observed == 0 and rep.worst_witness == (1, -1)
    rep = kam_frequency_audit([F(1), PHI, PHI * PHI], 10, 2)
    assert rep.K_observed == 0 and rep.worst_witness == (1, 1, -1)
    rep = kam_frequency_audit([F(1), SQRT2], 1000, 1)
    assert rep.K_observed > 0
    # |q1 + q2 sqrt2| |q|_1 >= ||q2 sqrt2|| |q2|, and |q|_1 ~ (1 + sqrt2)|q2|
    _, K, _ = certify_badly_approximable(SQRT2)
    assert rep.K_observed >= K


def test_mixed_fields_rejected():
    with pytest.raises(DomainError):
        kam_frequency_audit([SQRT2, PHI], 10, 1)
    with pytest.raises(DomainError):
        additive_type_audit([SQRT2, parse_number("sqrt(3)")], 10, 1)


@settings(max_examples=25, deadline=None)
@given(st.fractions(F(1, 7), 9, max_denominator=9), st.sampled_from(["kam", "add", "rot"]))
def test_scaling_law(c, which):
    if which == "kam":
        base = [F(1), SQRT2 + F(1, 3)]
        a, b = kam_frequency_audit(base, 40, 1), kam_frequency_audit([c * x for x in base], 40, 1)
    elif which == "add":
        base = [F(1), PHI]
        a, b = additive_type_audit(base, 25, 1), additive_type_audit([c * x for x in base], 25, 1)
    else:
        # ||k c rho|| is not c ||k rho||, so use the additive form of one rate
        base = [PHI + 2]
        a, b = additive_type_audit(base, 40, 2), additive_type_audit([c * x for x in base], 40, 2)
    assert b.worst_witness == a.worst_witness
    assert b.K_value == pytest.approx(float(c) * a.K_value, rel=1e-9)


def test_exceptional_dimension_single_source():
    for rep, kind, n in [
        (rotation_audit(SQRT2, 50, 3), Kind.REAL, 1),
        (pde_ratio_audit(CPoint(F(1, 3), F(1, 5)), 10, 2), Kind.COMPLEX, 1),
    ]:
        assert rep.exceptional_dimension == closed_form_dimension(LimsupSetDescriptor(kind, rep.v, n))


def test_fourier_bound():
    rep = pde_ratio_audit((F(1, 2), parse_number("sqrt(3)/2")), 20, 1)
    fb = fourier_decay_bound((1, rep.v + 4), rep)
    assert fb.bounded_second_derivatives and fb.decay_order == 4
    fb = fourier_decay_bound((1, rep.v + 2), rep, alpha_abs=1)
    for s, b in fb.table:
        assert b == pytest.approx(s**-2 / float(rep.K_observed))
    assert fb.bounded_second_derivatives and not fb.summable_second_derivatives
    assert fourier_decay_bound((1, rep.v + 7), rep).summable_second_derivatives
    assert not fourier_decay_bound((1, rep.v + 1), rep).bounded_second_derivatives
    with pytest.raises(DomainError):
        fourier_decay_bound((1, 5), pde_ratio_audit(CPoint(F(1, 2), 0), 10))


def test_fit_exponent():
    v, rows = fit_exponent("rotation", SQRT2, 500, [F(1, 2), 1, F(3, 2), 2], F(1, 10))
    assert v == 1
    assert [r[0] for r in rows] == [F(1, 2), 1, F(3, 2), 2]
    assert all(a[1] <= b[1] for a, b in zip(rows, rows[1:]))
    assert fit_exponent("rotation", F(1, 3), 50, [1, 2], F(1, 10))[0] is None
    with pytest.raises(DomainError):
        fit_exponent("nope", SQRT2, 10, [1], 0)


def test_report_record():
    rec = rotation_audit(PHI, 100).as_record()
    assert rec["condition_kind"] == "rotation" and rec["v"] == "1/1"
    assert set(rec) >= {"J", "K_observed", "worst_witness", "exceptional_dimension", "exact_resonance"}


def test_wide_integer_fallback_matches_brute_force():
    rho = F(123456789123, 987654321987654)
    rep = rotation_audit(rho, 300, 1)
    brute = min((norm_to_nearest(k, rho) * k, k) for k in range(1, 301))
    assert rep.K_observed == brute[0] and rep.worst_witness[0] == brute[1]
    w = parse_number("sqrt(2)") * F(10**12 + 1, 10**12)
    a = kam_frequency_audit([F(1), w], 60, 1)
    b = kam_frequency_audit([F(1), parse_number("sqrt(2)")], 60, 1)
    assert a.worst_witness == b.worst_witness
    assert a.K_value == pytest.approx(b.K_value, rel=1e-9)
