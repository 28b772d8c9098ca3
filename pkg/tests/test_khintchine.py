import math
import random
import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from diolab.arith import DomainError, compare, parse_number
from diolab.contfrac import cf_expand, convergents, norm_to_nearest
from diolab.khintchine import (
    ApproxFunction, measure_by_merge, measure_tail_real, measure_union_complex, measure_union_real,
    merge_intervals, series_test, solution_count, tail_sum_bound,
)

pytestmark = pytest.mark.filterwarnings("ignore:Psi")


def test_series_examples():
    assert series_test(ApproxFunction.power(F(1, 2), 3)).verdict == "Convergent"
    assert series_test(ApproxFunction.power(F(1, 2), 2)).verdict == "Divergent"
    assert series_test(ApproxFunction.power(1, 2, 1)).verdict == "Divergent"
    assert series_test(ApproxFunction.power(1, 2, F(11, 10))).verdict == "Convergent"


def test_series_kinds():
    # plane: sum k^2 Psi^2 with Psi = k^-a converges iff a > 3/2
    assert series_test(ApproxFunction.power(1, F(3, 2)), "plane_k2Psi2").verdict == "Divergent"
    assert series_test(ApproxFunction.power(1, F(8, 5)), "plane_k2Psi2").verdict == "Convergent"
    # complex: sum k^3 Psi^2 converges iff a > 2
    v = series_test(ApproxFunction.power(1, 2), "complex_k3Psi2")
    assert v.verdict == "Divergent" and v.monotone_hypothesis and "k^2 Psi(k)" in v.note
    assert series_test(ApproxFunction.power(1, 3), "complex_k3Psi2").verdict == "Convergent"
    with pytest.raises(DomainError):
        series_test(ApproxFunction.power(1, 2), "nope")


def test_series_monotonicity_flag():
    v = series_test(ApproxFunction.power(1, F(1, 2)))
    assert v.verdict == "Divergent" and v.monotone_hypothesis is False
    assert "no measure claim" in v.measure_claim


@settings(max_examples=80)
@given(st.fractions(F(1, 2), 4, max_denominator=6), st.fractions(-2, 3, max_denominator=4))
def test_power_log_always_decided(a, b):
    for kind in ("real_kPsi", "plane_k2Psi2", "complex_k3Psi2"):
        v = series_test(ApproxFunction.power(1, a, b), kind, K=64)
        assert v.verdict in ("Convergent", "Divergent") and v.exact


def test_table_series_is_evidence_only():
    conv = ApproxFunction("table", table={q: F(1, q**3) for q in range(1, 4097)})
    v = series_test(conv)
    assert v.verdict in ("Convergent", "Undecided") and not v.exact
    div = ApproxFunction("table", table={q: F(1, 2 * q * q) for q in range(1, 4097)})
    assert series_test(div).verdict in ("Divergent", "Undecided")


def test_single_q_table():
    # the two unit intervals around 0 and 1, each clipped to [0,1)
    assert measure_union_real(ApproxFunction("table", table={1: F(1, 4)}), 1) == F(1, 2)
    assert measure_union_real(ApproxFunction("table", table={1: F(1, 2)}), 1) == 1


def test_zero_table():
    psi = ApproxFunction("table", table={q: 0 for q in range(1, 11)})
    assert measure_union_real(psi, 10) == 0


def test_divergent_union_trend():
    psi = ApproxFunction.power(F(1, 2), 2)
    ms = [measure_union_real(psi, Q) for Q in (10, 100, 1000)]
    assert all(isinstance(m, F) for m in ms)
    assert ms[0] <= ms[1] <= ms[2] <= 1
    assert ms[-1] > F(99, 100)


def test_convergent_tail():
    psi = ApproxFunction.power(1, 3)
    prev = None
    for N in (10, 50, 100):
        m = measure_tail_real(psi, N, 1000)
        assert isinstance(m, F)
        assert m <= tail_sum_bound(psi, N, 1000)
        assert prev is None or m < prev
        prev = m


def test_tail_single_q():
    psi = ApproxFunction.power(1, 2)
    for Q in (2, 7, 30):
        assert measure_tail_real(psi, Q, Q) <= 2 * (Q + 1) * psi(Q)


def test_divergent_tail_stays_large():
    assert measure_tail_real(ApproxFunction.power(F(1, 2), 2), 50, 1000) > F(1, 10)


def test_tail_range_errors():
    psi = ApproxFunction.power(1, 2)
    with pytest.raises(DomainError):
        measure_tail_real(psi, 5, 4)
    with pytest.raises(DomainError):
        measure_union_real(psi, 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.fractions(0, 1, max_denominator=30), st.fractions(0, F(1, 3), max_denominator=30)),
                min_size=1, max_size=25), st.randoms())
def test_merge_invariant_under_permutation_and_splitting(raw, rnd):
    ivs = [(c, c + w) for c, w in raw]
    total = sum((b - a for a, b in merge_intervals(ivs)), F(0))
    shuffled = ivs[:]
    rnd.shuffle(shuffled)
    assert sum((b - a for a, b in merge_intervals(shuffled)), F(0)) == total
    split = []
    for a, b in ivs:
        if b > a:
            m = a + (b - a) * F(rnd.randint(1, 9), 10)
            # overlapping halves, since the pieces are open
            split += [(a, m + (b - a) / 100), (m, b)]
        else:
            split.append((a, b))
    assert sum((b - a for a, b in merge_intervals(split)), F(0)) == total
    pieces = merge_intervals(ivs)
    assert all(p[1] < q[0] or p[1] == q[0] for p, q in zip(pieces, pieces[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(2, 60), st.integers(1, 20))
def test_fast_union_matches_merge(c, a, Q, N):
    psi = ApproxFunction.power(F(1, 2 * c), a)
    N = min(N, Q)
    assert _union(psi, N, Q) == measure_by_merge(psi, N, Q)


def _union(psi, N, Q):
    return measure_tail_real(psi, N, Q) if N > 1 else measure_union_real(psi, Q)


def test_fast_union_matches_merge_on_tables():
    rnd = random.Random(3)
    for _ in range(10):
        Q = rnd.randint(2, 40)
        psi = ApproxFunction("table", table={q: F(rnd.randint(0, 5), rnd.randint(4, 12) * q * q) for q in range(1, Q + 1)})
        assert measure_union_real(psi, Q) == measure_by_merge(psi, 1, Q)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 150), st.integers(1, 50))
def test_union_monotone_in_Q_and_psi(Q, extra):
    small = ApproxFunction.power(F(1, 5), 2)
    big = ApproxFunction.power(F(1, 3), 2)
    assert measure_union_real(small, Q) <= measure_union_real(small, Q + extra)
    assert measure_union_real(small, Q) <= measure_union_real(big, Q)


def test_complex_convergent_tail_small_and_decreasing():
    psi = ApproxFunction.power(1, 3)
    outers = [measure_union_complex(psi, 30, 512, N).outer for N in (4, 8, 16)]
    assert outers[0] > outers[1] > outers[2]
    assert outers[-1] < F(1, 100)


def test_complex_dirichlet_cover():
    for N in (4, 8):
        psi = ApproxFunction("callback", fn=lambda a, N=N: 2 / (a * N))
        b = measure_union_complex(psi, N, 256)
        assert b.estimate == 1


def test_complex_resolution_tightens():
    psi = ApproxFunction.power(1, 3)
    gaps = [measure_union_complex(psi, 10, r).outer - measure_union_complex(psi, 10, r).inner for r in (128, 256, 512)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_solution_count_golden_ratio():
    phi = parse_number("(1+sqrt(5))/2")
    c = parse_number("sqrt(5)/5") * F(1000001, 1000000)
    psi = ApproxFunction.power(c, 2)
    Q = 1000
    n = solution_count(phi, psi, Q)
    convs = sorted({(p, q) for p, q in convergents(cf_expand(phi), 40) if q <= Q})
    hits = [(p, q) for p, q in convs if compare(abs(phi - F(p, q)), psi(q)) < 0]
    # below 1/(2q^2) every solution is a convergent, so the two counts agree
    assert n == len(hits)
    # the odd-indexed Fibonacci ratios sit just outside 1/(sqrt5 q^2) until q^2 ~ 2 10^5
    assert len(hits) >= len(convs) // 2
    big = [(p, q) for p, q in convs if q > 500]
    assert big
    assert all((p, q) in hits for p, q in big)


def test_solution_count_rational():
    assert solution_count(F(1, 2), ApproxFunction.power(1, 3), 1000) <= 2


def test_solution_count_clipped_constant():
    x = parse_number("(1+sqrt(5))/2")
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        psi = ApproxFunction.power(1, 0)
        psi(3)
    assert any("clipped" in str(m.message) for m in w)
    Q = 60
    # every q has its nearest p inside 1/(2q); only the reduced ones count
    assert all(compare(norm_to_nearest(q, x), F(1, 2)) < 0 for q in range(1, Q + 1))
    reduced = sum(1 for q in range(1, Q + 1) if math.gcd(round(float(x * q)), q) == 1)
    assert solution_count(x, psi, Q) == reduced


def test_approx_function_validation():
    with pytest.raises(DomainError):
        ApproxFunction.power(0, 2)
    with pytest.raises(DomainError):
        ApproxFunction("table")
    with pytest.raises(DomainError):
        ApproxFunction("table", table={1: F(1, 4)}).raw(2)
