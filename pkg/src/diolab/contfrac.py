"""Continued fractions of rationals and real quadratic surds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .arith import DomainError, QuadraticSurd, as_fraction, parse_number

__all__ = [
    "CFExpansion",
    "QuadraticSurd",
    "cf_expand_rational",
    "cf_expand_surd",
    "cf_expand",
    "convergents",
    "cf_value",
    "certify_badly_approximable",
    "norm_to_nearest",
    "diophantine_type_fit",
    "TypeFit",
]


@dataclass(frozen=True)
class CFExpansion:
    """[a0; a1, ...] as a preperiod followed by an optional repeating period."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...] = ()
    field_d: int | None = field(default=None, compare=False)  # sqrt(d) field, when known

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(a) for a in self.preperiod))
        object.__setattr__(self, "period", tuple(int(a) for a in self.period))
        if not self.preperiod and not self.period:
            raise DomainError("empty expansion")
        terms = self.preperiod[1:] + self.period if self.preperiod else self.period[1:]
        if any(a <= 0 for a in terms):
            raise DomainError("partial quotients after a0 must be positive")

    @property
    def is_finite(self) -> bool:
        return not self.period

    def terms(self) -> Iterator[int]:
        yield from self.preperiod
        if self.period:
            while True:
                yield from self.period

    def head(self, n: int) -> list[int]:
        out = []
        for a in self.terms():
            if len(out) >= n:
                break
            out.append(a)
        return out

    def __str__(self):
        pre = list(self.preperiod)
        if not pre:
            return "[(" + ", ".join(map(str, self.period)) + ")]"
        s = f"[{pre[0]}"
        rest = [str(a) for a in pre[1:]]
        if rest:
            s += "; " + ", ".join(rest)
        if self.period:
            s += ("; " if not rest else ", ") + "(" + ", ".join(map(str, self.period)) + ")"
        return s + "]"


def cf_expand_rational(r) -> CFExpansion:
    r = as_fraction(r)
    out = []
    num, den = r.numerator, r.denominator
    while den:
        a, rem = divmod(num, den)
        out.append(a)
        num, den = den, rem
    return CFExpansion(tuple(out))


def cf_expand_surd(s: QuadraticSurd, max_steps: int = 100_000) -> CFExpansion:
    """Eventually periodic expansion of an irrational quadratic surd.

    Works with the complete quotients (P + sqrt D) / Q where Q divides D - P^2;
    the period is found when a (P, Q) state repeats, which is exact.
    """
    if not isinstance(s, QuadraticSurd) or s.is_rational():
        raise DomainError("cf_expand_surd needs an irrational quadratic surd")
    a, b, c, d = s.a, s.b, s.c, s.d
    if b < 0:
        a, b, c = -a, -b, -c
    # (a + sqrt(b^2 d)) / c, scaled by |c| so that Q | D - P^2
    P, D, Q = a * abs(c), b * b * d * c * c, c * abs(c)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    r = math.isqrt(D)
    for _ in range(max_steps):
        if (P, Q) in seen:
            i = seen[(P, Q)]
            return CFExpansion(tuple(terms[:i]), tuple(terms[i:]), field_d=d)
        seen[(P, Q)] = len(terms)
        # floor((P + sqrt D)/Q), exact because sqrt D is irrational
        num = P + (r if Q > 0 else r + 1)
        ak = num // Q
        terms.append(ak)
        P = ak * Q - P
        Q = (D - P * P) // Q
    raise DomainError("period not found within step budget")


def cf_expand(x) -> CFExpansion:
    x = parse_number(x)
    if isinstance(x, QuadraticSurd):
        return cf_expand_rational(x.rational()) if x.is_rational() else cf_expand_surd(x)
    return cf_expand_rational(x)


def convergents(e: CFExpansion, n: int) -> list[tuple[int, int]]:
    """First n convergents (p_k, q_k). A finite expansion stops at its last term."""
    out = []
    p0, q0, p1, q1 = 1, 0, 0, 1  # p_{-1}, q_{-1}, p_{-2}, q_{-2}
    for a in e.terms():
        if len(out) >= n:
            break
        p, q = a * p0 + p1, a * q0 + q1
        out.append((p, q))
        p1, q1, p0, q0 = p0, q0, p, q
    return out


def cf_value(e: CFExpansion):
    """Exact value: a Fraction for finite expansions, a QuadraticSurd for periodic ones."""
    if e.is_finite:
        v = Fraction(e.preperiod[-1])
        for a in reversed(e.preperiod[:-1]):
            v = a + 1 / v
        return v
    # the purely periodic tail y satisfies y = [period; y]
    k = len(e.period)
    conv = convergents(CFExpansion(e.period), k)
    p, q = conv[-1]
    pp, qq = conv[-2] if k > 1 else (1, 0)
    # y = (p y + pp) / (q y + qq)  =>  q y^2 + (qq - p) y - pp = 0, take the root > 1
    A, B, C = q, qq - p, -pp
    disc = B * B - 4 * A * C
    from .arith import _square_split

    kk, dd = _square_split(disc, e.field_d)
    y = QuadraticSurd(-B, kk, 2 * A, dd)
    v = y
    for a in reversed(e.preperiod):
        v = a + 1 / v
    return v


def certify_badly_approximable(x) -> tuple[int, Fraction, str]:
    """Return (N, K, note) with |x - p/q| >= K / q^2 for all p/q.

    N is the largest partial quotient a_n with n >= 1 and K = 1/(N + 2).
    The constant is certified, not optimal.
    """
    x = parse_number(x)
    if not isinstance(x, QuadraticSurd) or x.is_rational():
        raise DomainError("certificate needs an irrational quadratic surd")
    e = cf_expand_surd(x)
    tail = list(e.preperiod[1:]) + list(e.period)
    N = max(tail)
    return N, Fraction(1, N + 2), "certified, not optimal"


def norm_to_nearest(q: int, x) -> object:
    """||q x||, exact."""
    x = parse_number(x)
    qx = x * q
    f = math.floor(qx)
    lo = qx - f
    hi = (f + 1) - qx
    return lo if lo <= hi else hi


@dataclass
class TypeFit:
    K: Fraction
    v: Fraction
    residual: float
    points: list[tuple[float, float]] = field(default_factory=list)


def diophantine_type_fit(x, depth: int) -> TypeFit:
    """Fit ||q_k x|| ~ K q_k^{-v} along the first `depth` convergents.

    Uses the identity ||q_k x|| = 1/(x_{k+1} q_k + q_{k-1}) with x_{k+1} the
    complete quotient, so large partial quotients are handled exactly.
    """
    e = x if isinstance(x, CFExpansion) else cf_expand(x)
    head = e.head(depth + 2)
    if len(head) < 4:
        raise DomainError("too few convergents to fit a type")
    conv = convergents(e, len(head))
    logs_q, logs_n = [], []
    K = None
    for k in range(1, len(head) - 1):
        tail = CFExpansion(tuple(head[k + 1 :]))
        xk1 = cf_value(tail)  # truncated complete quotient, exact rational
        qk, qkm = conv[k][1], conv[k - 1][1]
        dist = 1 / (xk1 * qk + qkm)
        lq = math.log(qk)
        ln = math.log(dist.numerator) - math.log(dist.denominator)
        if lq > 0:
            logs_q.append(lq)
            logs_n.append(ln)
    X = np.array(logs_q)
    Y = np.array(logs_n)
    A = np.vstack([X, np.ones_like(X)]).T
    (slope, icpt), res, *_ = np.linalg.lstsq(A, Y, rcond=None)
    v = -slope
    K = min(math.exp(y + v * xq) for xq, y in zip(X, Y))
    resid = float(np.sqrt(res[0] / len(X))) if len(res) else 0.0
    return TypeFit(
        Fraction(K).limit_denominator(10**9),
        Fraction(v).limit_denominator(10**9),
        resid,
        list(zip(X.tolist(), Y.tolist())),
    )
