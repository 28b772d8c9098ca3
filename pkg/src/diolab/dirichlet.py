"""Certified Dirichlet-type approximants, real and complex."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .arith import (
    CPoint,
    DomainError,
    GaussianInt,
    InvariantViolation,
    QuadraticSurd,
    as_fraction,
    compare,
    exact_sign,
    format_number,
    lower_fraction,
    nearest_gaussian,
    parse_number,
    sqrt_bounds,
    upper_fraction,
)
from .contfrac import cf_expand, convergents

__all__ = [
    "Approximant",
    "pigeonhole_pair",
    "real_dirichlet",
    "simultaneous_dirichlet",
    "complex_dirichlet",
    "complex_dirichlet_multiples",
    "hurwitz_stream",
]


@dataclass(frozen=True)
class Approximant:
    """p/q with a certified error.

    ``error`` is exact when rational, otherwise a rational upper bound;
    ``bound`` is exact when rational, otherwise a rational lower bound.
    In all cases error < bound holds, so the approximant is certified.
    ``exact_error`` keeps the exact value when it is a surd.
    """

    p: object
    q: object
    error: Fraction
    bound: Fraction
    exact_error: object = None

    def as_record(self) -> dict:
        def pair(g):
            if isinstance(g, GaussianInt):
                return [g.re, g.im]
            return [int(g), 0]

        return {
            "p": pair(self.p),
            "q": pair(self.q),
            "error": format_number(self.error),
            "bound": format_number(self.bound),
        }


def _separate(err, bnd) -> tuple[Fraction, Fraction]:
    """Rational ub(err) < lb(bnd), refining precision until they separate."""
    for digits in (20, 40, 80, 160, 320):
        e = err if isinstance(err, Fraction) else upper_fraction(err, digits)
        b = bnd if isinstance(bnd, Fraction) else lower_fraction(bnd, digits)
        if e < b:
            return e, b
    raise InvariantViolation("error and bound not separable")


def _real_target(alpha):
    alpha = parse_number(alpha)
    if isinstance(alpha, QuadraticSurd) and alpha.is_rational():
        alpha = alpha.rational()
    return alpha


def pigeonhole_pair(alpha, N: int) -> tuple[int, int]:
    """The pair (p, q) produced by the box principle on {r alpha}, 0 <= r <= N."""
    alpha = _real_target(alpha)
    bins: dict[int, int] = {}
    floors = []
    for r in range(N + 1):
        x = alpha * r
        f = math.floor(x)
        floors.append(f)
        b = math.floor((x - f) * N)
        if b in bins:
            r0 = bins[b]
            return floors[r] - floors[r0], r - r0
        bins[b] = r
    raise InvariantViolation("box principle failed")


def real_dirichlet(alpha, N: int, method: str = "best") -> Approximant:
    """p/q with 1 <= q <= N and |alpha - p/q| < 1/(q N).

    ``method="pigeonhole"`` returns the box-principle pair itself.
    ``method="best"`` (default) returns the qualifying p/q of smallest error,
    ties to the smaller q; the box principle guarantees one exists.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    alpha = _real_target(alpha)
    p0, q0 = pigeonhole_pair(alpha, N)

    def err_of(p, q):
        return abs(alpha - Fraction(p, q))

    if exact_sign(Fraction(1, q0 * N) - err_of(p0, q0)) <= 0:
        raise InvariantViolation("box principle pair misses the bound")
    if method == "pigeonhole":
        p, q = p0, q0
    elif method == "best":
        p, q, best = p0, q0, None
        for qq in range(1, N + 1):
            x = alpha * qq
            pp = math.floor(x)
            if compare(x - pp, Fraction(1, 2)) > 0:
                pp += 1
            e = err_of(pp, qq)
            if compare(e, Fraction(1, qq * N)) < 0 and (best is None or compare(e, best) < 0):
                p, q, best = pp, qq, e
    else:
        raise DomainError(f"unknown method {method!r}")
    e = err_of(p, q)
    err, bnd = _separate(e, Fraction(1, q * N))
    return Approximant(p, q, err, bnd, e)


def simultaneous_dirichlet(alphas: Sequence, N: int) -> Approximant:
    """q <= N and p with max_i |alpha_i - p_i/q| < 1/(q N^(1/n)).

    Best qualifying q (smallest max-error, ties to smaller q). Comparisons
    against N^(1/n) are done on n-th powers, so they are exact.
    """
    alphas = [_real_target(a) for a in alphas]
    n = len(alphas)
    if n < 1 or N < 1:
        raise DomainError("need n >= 1 and N >= 1")
    best = None
    for q in range(1, N + 1):
        ps, devs = [], []
        for a in alphas:
            x = a * q
            p = math.floor(x)
            if compare(x - p, Fraction(1, 2)) > 0:
                p += 1
            ps.append(p)
            devs.append(abs(x - p))  # |q a - p|
        worst = devs[0]
        for d_ in devs[1:]:
            if compare(d_, worst) > 0:
                worst = d_
        # q * err = worst  and  worst^n * N < 1  <=>  err < 1/(q N^(1/n))
        if compare(worst**n * N, 1) < 0:
            err = worst / q
            if best is None or compare(err, best[2]) < 0:
                best = (tuple(ps), q, err)
    if best is None:
        raise InvariantViolation("no simultaneous approximant found")
    ps, q, err = best
    with_root = _nth_root_lower(Fraction(1, q**n * N), n)
    e_up, b_lo = _separate(err, with_root)
    return Approximant(ps, q, e_up, b_lo, err)


def _nth_root_lower(r: Fraction, n: int, digits: int = 40) -> Fraction:
    if n == 1:
        return r
    if n == 2:
        return sqrt_bounds(r, digits)[0]
    import mpmath

    with mpmath.workdps(digits + 20):
        v = mpmath.root(mpmath.mpf(r.numerator) / r.denominator, n)
    lo = Fraction(int(mpmath.floor(v * 10**digits)) - 1, 10**digits)
    while lo**n > r:
        lo -= Fraction(1, 10**digits)
    return lo


def _gaussian_ball(N: int) -> np.ndarray:
    """Normalized q (re > 0, im >= 0) with |q| <= N, by norm then (re, im).

    Associates give the same fraction, so one representative is enough.
    """
    r = np.arange(-N, N + 1, dtype=np.int64)
    a, b = np.meshgrid(r, r, indexing="ij")
    a, b = a.ravel(), b.ravel()
    n = a * a + b * b
    keep = (a > 0) & (b >= 0) & (n <= N * N)
    a, b, n = a[keep], b[keep], n[keep]
    order = np.lexsort((b, a, n))
    return np.stack([a[order], b[order], n[order]], axis=1)


_BALLS: dict[int, np.ndarray] = {}


def _ball(N: int) -> np.ndarray:
    if N not in _BALLS:
        _BALLS[N] = _gaussian_ball(N)
    return _BALLS[N]


def _round_half_down_int(num: np.ndarray, den: int) -> np.ndarray:
    # ceil(num/den - 1/2) = -floor((den - 2 num) / (2 den))
    return -((den - 2 * num) // (2 * den))


def complex_dirichlet(z, N: int) -> Approximant:
    """q in Z[i] with 0 < |q| <= N and |z - p/q| < 2/(|q| N), p nearest to q z.

    Among qualifying q the one with smallest error is returned, ties broken
    by smaller norm and then lexicographically by (re, im).
    """
    z = CPoint.of(z)
    if N < 1:
        raise DomainError("N must be >= 1")
    D = math.lcm(z.re.denominator, z.im.denominator)
    X, Y = int(z.re * D), int(z.im * D)
    ball = _ball(N)
    big = max(abs(X), abs(Y), D) * N
    if big < 2**30:  # keeps R * N^2 and 4 D^2 inside int64
        qa, qb, qn = ball[:, 0], ball[:, 1], ball[:, 2]
        U = qa * X - qb * Y
        V = qb * X + qa * Y
        pa = _round_half_down_int(U, D)
        pb = _round_half_down_int(V, D)
        ra, rb = U - pa * D, V - pb * D
        R = ra * ra + rb * rb  # |q z - p|^2 * D^2
        ok = R * N * N < 4 * D * D
        idx = np.nonzero(ok)[0]
        if idx.size == 0:
            raise InvariantViolation("no complex Dirichlet approximant")
        # float preselection, then exact cross multiplication on the near-minimal ones
        ratio = R[idx] / qn[idx]
        near = idx[ratio <= ratio.min() * (1 + 1e-9) + 1e-300]
        besti = int(near[0])
        for i in near[1:]:
            i = int(i)
            if int(R[i]) * int(qn[besti]) < int(R[besti]) * int(qn[i]):
                besti = i
        q = GaussianInt(int(qa[besti]), int(qb[besti]))
        p = GaussianInt(int(pa[besti]), int(pb[besti]))
    else:
        q, p = _complex_dirichlet_slow(z, N)
    return _complex_record(z, p, q, N)


def _complex_dirichlet_slow(z: CPoint, N: int):
    best = None
    for qa, qb, qn in _ball(N).tolist():
        q = GaussianInt(qa, qb)
        w = CPoint.of(q) * z
        p = nearest_gaussian(w)
        r2 = (w - p).norm2()
        if r2 * N * N < 4:
            e2 = r2 / qn
            if best is None or e2 < best[0]:
                best = (e2, q, p)
    if best is None:
        raise InvariantViolation("no complex Dirichlet approximant")
    return best[1], best[2]


def _complex_record(z: CPoint, p: GaussianInt, q: GaussianInt, N: int) -> Approximant:
    w = CPoint.of(q) * z
    r2 = (w - p).norm2()
    if not r2 * N * N < 4:
        raise InvariantViolation("complex approximant misses the bound")
    e2 = r2 / q.norm()  # |z - p/q|^2
    b2 = Fraction(4, q.norm() * N * N)  # (2/(|q| N))^2
    for digits in (20, 40, 80, 160):
        e_hi = sqrt_bounds(e2, digits)[1]
        b_lo = sqrt_bounds(b2, digits)[0]
        if e_hi < b_lo:
            return Approximant(p, q, e_hi, b_lo, e2)
    raise InvariantViolation("error and bound not separable")


def complex_dirichlet_multiples(z, N: int, a: Approximant) -> list[Approximant]:
    """Non-reduced multiples (k p)/(k q) of an approximant that still meet their bound."""
    z = CPoint.of(z)
    out = []
    for ka, kb, kn in _ball(N).tolist():
        k = GaussianInt(ka, kb)
        if kn == 1:
            continue
        kq = k * a.q
        if kq.norm() > N * N:
            continue
        kp = k * a.p
        r2 = (CPoint.of(kq) * z - kp).norm2()
        if r2 * N * N < 4:
            out.append(_complex_record(z, kp, kq, N))
    return out


def hurwitz_stream(alpha, count: int) -> Iterator[tuple[int, int]]:
    """Convergents p/q of alpha with |alpha - p/q| < 1/(sqrt(5) q^2), in order.

    The test 5 q^4 (alpha - p/q)^2 < 1 is exact. Yields at most `count`
    fractions; for rationals the stream ends with the expansion.
    """
    alpha = _real_target(alpha)
    e = cf_expand(alpha)
    got = 0
    k = 0
    while got < count:
        k += 1
        conv = convergents(e, k)
        if len(conv) < k:
            return
        p, q = conv[-1]
        d = alpha - Fraction(p, q)
        if compare(d * d * (5 * q**4), 1) < 0:
            got += 1
            yield p, q
        if k > 40 * count + 200:
            return
