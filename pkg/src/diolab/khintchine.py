"""Khintchine-type dichotomies: series tests and exact measures of finite unions."""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .arith import DomainError, QuadraticSurd, compare, parse_number
from .resonant import DiscRaster, MeasureBounds, _residues, capped_bounds, normalized_denominators

SERIES_KINDS = ("real_kPsi", "plane_k2Psi2", "complex_k3Psi2")


@dataclass(frozen=True)
class ApproxFunction:
    """Psi(q) = c q^-a (log q)^-b, an explicit table, or a numeric callback.

    Values are clipped to 1/(2q) with a warning, so every interval
    |x - p/q| < Psi(q) holds at most one fraction with denominator q.
    """

    family: str = "power_log"
    c: object = Fraction(1)
    a: Fraction = Fraction(2)
    b: Fraction = Fraction(0)
    table: Optional[dict] = None
    fn: Optional[Callable[[int], float]] = None

    def __post_init__(self):
        if self.family not in ("power_log", "table", "callback"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.family == "power_log":
            object.__setattr__(self, "a", Fraction(self.a))
            object.__setattr__(self, "b", Fraction(self.b))
            if not isinstance(self.c, QuadraticSurd):
                object.__setattr__(self, "c", Fraction(self.c))
            if compare(self.c, 0) <= 0:
                raise DomainError("c must be positive")
        if self.family == "table" and not self.table:
            raise DomainError("table family needs a table")
        if self.family == "callback" and self.fn is None:
            raise DomainError("callback family needs fn")

    @staticmethod
    def power(c, a, b=0) -> "ApproxFunction":
        return ApproxFunction("power_log", parse_number(c) if isinstance(c, str) else c, a, b)

    @property
    def exact(self) -> bool:
        if self.family == "table":
            return True
        if self.family == "callback":
            return False
        return self.b == 0 and self.a.denominator == 1

    def raw(self, q: int):
        if q < 1:
            raise DomainError("q must be >= 1")
        if self.family == "table":
            if q not in self.table:
                raise DomainError(f"table has no value at q = {q}")
            return Fraction(self.table[q])
        if self.family == "callback":
            return float(self.fn(q))
        if self.exact:
            return self.c / Fraction(q) ** int(self.a)
        if q == 1 and self.b > 0:
            return math.inf
        val = float(self.c) * q ** (-float(self.a))
        if self.b != 0:
            val *= math.log(q) ** (-float(self.b))
        return val

    def __call__(self, q: int):
        v = self.raw(q)
        cap = Fraction(1, 2 * q)
        if compare(v, cap) > 0:
            warnings.warn(f"Psi({q}) clipped to 1/(2q)", stacklevel=2)
            return cap if (isinstance(v, (Fraction, QuadraticSurd)) or self.exact) else 1 / (2 * q)
        return v


@dataclass
class DichotomyVerdict:
    verdict: str  # "Convergent", "Divergent" or "Undecided"
    series_kind: str
    exact: bool
    monotone_hypothesis: Optional[bool]
    measure_claim: str
    evidence: list = field(default_factory=list)
    note: str = ""

    def as_record(self) -> dict:
        return {
            "verdict": self.verdict,
            "series_kind": self.series_kind,
            "exact": self.exact,
            "monotone_hypothesis": self.monotone_hypothesis,
            "measure_claim": self.measure_claim,
            "evidence": [[int(k), float(s)] for k, s in self.evidence],
            "note": self.note,
        }


def _bertrand(p: Fraction, r: Fraction) -> bool:
    """Sum of k^-p (log k)^-r converges."""
    return p > 1 or (p == 1 and r > 1)


def _series_exponents(kind: str, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    # term = k^-p (log k)^-r
    if kind == "real_kPsi":
        return a - 1, b
    if kind == "plane_k2Psi2":
        return 2 * a - 2, 2 * b
    if kind == "complex_k3Psi2":
        return 2 * a - 3, 2 * b
    raise DomainError(f"unknown series kind {kind!r}")


def _monotone(kind: str, a: Fraction, b: Fraction) -> bool:
    # real and plane need k Psi(k) eventually nonincreasing, complex k^2 Psi(k)
    e = 2 if kind == "complex_k3Psi2" else 1
    return a > e or (a == e and b >= 0)


def _term(kind: str, k: int, psi) -> float:
    v = float(psi.raw(k))
    if kind == "real_kPsi":
        return k * v
    if kind == "plane_k2Psi2":
        return k * k * v * v
    return k**3 * v * v


def series_test(psi: ApproxFunction, kind: str = "real_kPsi", K: int = 4096) -> DichotomyVerdict:
    """Convergence of the Khintchine series for psi.

    power_log is decided symbolically. Finite tables and callbacks only give
    evidence from partial sums; their verdicts are labelled evidence-only.
    """
    if kind not in SERIES_KINDS:
        raise DomainError(f"kind must be one of {SERIES_KINDS}")
    claim = {
        "Convergent": "almost no point is approximable infinitely often",
        "Divergent": "almost every point is approximable infinitely often",
    }
    start = 2
    if psi.family == "table":
        K = min(K, max(psi.table))
    evidence = []
    partial = 0.0
    blocks = []
    chk = start
    for k in range(start, K + 1):
        t = _term(kind, k, psi)
        partial += t
        if k == chk or k == K:
            evidence.append((k, partial))
            chk *= 2
    note = ""
    if kind == "complex_k3Psi2":
        note = "monotonicity hypothesis taken as k^2 Psi(k) nonincreasing"
    if psi.family == "power_log":
        p, r = _series_exponents(kind, psi.a, psi.b)
        conv = _bertrand(p, r)
        mono = _monotone(kind, psi.a, psi.b)
        verdict = "Convergent" if conv else "Divergent"
        ms = claim[verdict]
        if verdict == "Divergent" and not mono:
            ms = "monotonicity hypothesis fails; no measure claim"
        return DichotomyVerdict(verdict, kind, True, mono, ms, evidence, note)
    # evidence only: growth of dyadic block sums
    for i in range(1, len(evidence)):
        (k0, s0), (k1, s1) = evidence[i - 1], evidence[i]
        if s1 > s0:
            blocks.append((k1, s1 - s0))
    verdict = "Undecided"
    if len(blocks) >= 3:
        x = np.log([b[0] for b in blocks[-4:]])
        y = np.log([b[1] for b in blocks[-4:]])
        e = float(np.polyfit(x, y, 1)[0])
        if e < -0.5:
            verdict = "Convergent"
        elif e > -0.05:
            verdict = "Divergent"
        note = (note + "; " if note else "") + f"evidence-only, block growth exponent {e:.3f}"
    return DichotomyVerdict(verdict, kind, False, None, "evidence-only", evidence, note)


# ---------------------------------------------------------------- exact 1-D measures


def merge_intervals(intervals) -> list[tuple]:
    """Union of open intervals as disjoint sorted pieces (touching pieces stay apart)."""
    items = sorted(intervals, key=lambda iv: iv[0])
    out: list[list] = []
    for lo, hi in items:
        if hi <= lo:
            continue
        if out and lo < out[-1][1]:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


def _interval_arrays(psi: ApproxFunction, q_lo: int, q_hi: int):
    qs, ps, radii = [], [], {}
    for q in range(q_lo, q_hi + 1):
        radii[q] = psi(q)
        qs.append(np.full(q + 1, q, dtype=np.int64))
        ps.append(np.arange(q + 1, dtype=np.int64))
    return np.concatenate(qs), np.concatenate(ps), radii


_TOL = 1e-13  # float endpoints are within 1e-15 of the exact ones


def _union_length(psi: ApproxFunction, q_lo: int, q_hi: int):
    """Length of the union of (p/q - Psi(q), p/q + Psi(q)) cap [0,1), q_lo <= q <= q_hi.

    A float sweep finds the connected pieces. Any decision closer than _TOL
    is redone in exact arithmetic, and each piece's length is computed from
    its exact extreme endpoints, so the result is exact for rational Psi.
    """
    Q, P, radii = _interval_arrays(psi, q_lo, q_hi)
    exact = all(isinstance(r, Fraction) for r in radii.values())
    rf = np.array([float(radii[q]) for q in range(q_lo, q_hi + 1)])[Q - q_lo]
    c = P / Q
    lo = np.maximum(c - rf, 0.0)
    hi = np.minimum(c + rf, 1.0)
    keep = hi > lo
    Q, P, lo, hi = Q[keep], P[keep], lo[keep], hi[keep]
    if Q.size == 0:
        return Fraction(0) if exact else 0.0
    order = np.argsort(lo, kind="stable")
    Q, P, lo, hi = Q[order], P[order], lo[order], hi[order]
    if not exact:
        run = np.maximum.accumulate(hi)
        brk = np.nonzero(lo[1:] >= run[:-1])[0] + 1
        starts = np.concatenate([[0], brk])
        ends = np.concatenate([brk, [lo.size]])
        return float(sum(run[e - 1] - lo[s_] for s_, e in zip(starts, ends)))

    def elo(i):
        return max(Fraction(int(P[i]), int(Q[i])) - radii[int(Q[i])], Fraction(0))

    def ehi(i):
        return min(Fraction(int(P[i]), int(Q[i])) + radii[int(Q[i])], Fraction(1))

    run = np.maximum.accumulate(hi)
    gap = lo[1:] - run[:-1]
    clear_break = gap > _TOL
    border = np.nonzero(np.abs(gap) <= _TOL)[0] + 1
    starts = set((np.nonzero(clear_break)[0] + 1).tolist())
    starts.add(0)
    seg_start = sorted(starts)

    def exact_run_max(a, b):
        # exact max of hi over indices a..b-1, inspecting only near-maximal ones
        m = hi[a:b].max()
        idx = np.nonzero(hi[a:b] >= m - _TOL)[0] + a
        return max(ehi(int(i)) for i in idx)

    # settle borderline breaks exactly
    extra = []
    for i in border.tolist():
        a = seg_start[bisect.bisect_right(seg_start, i - 1) - 1]
        if elo(i) >= exact_run_max(a, i):
            extra.append(i)
    if extra:
        seg_start = sorted(starts | set(extra))
    total = Fraction(0)
    bounds = np.array(seg_start + [lo.size], dtype=np.int64)
    A, B = bounds[:-1], bounds[1:]
    # lone unclipped intervals have length exactly 2 Psi(q): count them per q
    lone = (B - A == 1) & (lo[A] > _TOL) & (hi[A] < 1 - _TOL)
    per_q = np.bincount(Q[A[lone]] - q_lo, minlength=q_hi - q_lo + 1)
    for k in np.nonzero(per_q)[0].tolist():
        total += 2 * int(per_q[k]) * radii[q_lo + k]
    for a, b in zip(A[~lone].tolist(), B[~lone].tolist()):
        idx = np.nonzero(lo[a:b] <= lo[a] + _TOL)[0] + a
        first = min(elo(int(i)) for i in idx)
        total += exact_run_max(a, b) - first
    return total


def measure_union_real(psi: ApproxFunction, Q: int):
    """Exact |union_{q<=Q} W(q, Psi) cap [0,1)| for rational Psi, else a float."""
    if Q < 1:
        raise DomainError("Q must be >= 1")
    return _union_length(psi, 1, Q)


def measure_tail_real(psi: ApproxFunction, N: int, Q: int):
    """Measure of the union over N <= q <= Q."""
    if not (1 <= N <= Q):
        raise DomainError("need 1 <= N <= Q")
    return _union_length(psi, N, Q)


def measure_by_merge(psi: ApproxFunction, q_lo: int, q_hi: int):
    """Reference implementation: build every exact interval and merge them."""
    ivs = []
    for q in range(q_lo, q_hi + 1):
        r = psi(q)
        for p in range(q + 1):
            c = Fraction(p, q)
            lo, hi = max(c - r, 0), min(c + r, 1)
            if hi > lo:
                ivs.append((lo, hi))
    return sum((b - a for a, b in merge_intervals(ivs)), Fraction(0))


def tail_sum_bound(psi: ApproxFunction, N: int, Q: int):
    """sum_{q=N}^{Q} (q+1) 2 Psi(q), the trivial bound on the tail measure."""
    return sum(((q + 1) * 2 * psi(q) for q in range(N, Q + 1)), Fraction(0) if psi.exact else 0.0)


def measure_union_complex(psi: ApproxFunction, Q: int, resolution: int = 512, N: int = 1) -> MeasureBounds:
    """Area of the union of B(p/q, Psi(|q|)) over N <= |q| <= Q, as a sandwich."""
    if not (1 <= N <= Q):
        raise DomainError("need 1 <= N <= Q")
    pairs = normalized_denominators(N * N, Q * Q, strict_hi=False)
    ras = DiscRaster(resolution)
    area = 0.0
    for q1, q2 in pairs.tolist():
        xs, ys, n = _residues(q1, q2)
        r = _complex_radius(psi, n)
        ras.add(xs / n, ys / n, np.full(xs.shape, r))
        area += n * r * r
    return capped_bounds(ras.bounds(), area)


def _complex_radius(psi: ApproxFunction, n: int) -> float:
    aq = math.sqrt(n)
    if psi.family == "power_log":
        val = float(psi.c) * aq ** (-float(psi.a))
        if psi.b != 0:
            val *= math.log(aq) ** (-float(psi.b)) if aq > 1 else math.inf
        return min(val, 1 / (2 * aq))
    if psi.family == "callback":
        # complex measures hand the callback |q| itself
        return min(float(psi.fn(aq)), 1 / (2 * aq))
    k = max(1, int(aq))
    return min(float(psi.raw(k)), 1 / (2 * aq))


def solution_count(x, psi: ApproxFunction, Q: int) -> int:
    """#{p/q reduced, 1 <= q <= Q : |x - p/q| < Psi(q)}, exact comparisons."""
    x = parse_number(x)
    count = 0
    for q in range(1, Q + 1):
        r = psi(q)
        qx = x * q
        p = math.floor(qx)
        if compare(qx - p, Fraction(1, 2)) > 0:
            p += 1
        if math.gcd(p, q) != 1:
            continue
        if compare(abs(x - Fraction(p, q)), r) < 0:
            count += 1
    return count
