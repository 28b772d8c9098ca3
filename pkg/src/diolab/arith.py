"""Exact arithmetic: rationals, Gaussian integers and rationals, quadratic surds.

Rationals are ``fractions.Fraction``. Everything else here is built on top of
Python integers, so no floating point ever enters a predicate.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

Rational = Fraction
Number = Union[int, Fraction, "QuadraticSurd"]


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class InvariantViolation(RuntimeError):
    """An internal guarantee failed. Always a bug, never a user error."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise DomainError(f"not an exact rational: {x!r}")


def round_half_down(x: Fraction) -> int:
    """Nearest integer, ties toward minus infinity."""
    return math.ceil(as_fraction(x) - Fraction(1, 2))


# ---------------------------------------------------------------- Gaussian integers


@dataclass(frozen=True, slots=True)
class GaussianInt:
    re: int
    im: int

    @staticmethod
    def of(x) -> "GaussianInt":
        if isinstance(x, GaussianInt):
            return x
        if isinstance(x, int):
            return GaussianInt(x, 0)
        if isinstance(x, tuple) and len(x) == 2:
            return GaussianInt(int(x[0]), int(x[1]))
        raise DomainError(f"not a Gaussian integer: {x!r}")

    def __add__(self, o):
        o = GaussianInt.of(o)
        return GaussianInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussianInt.of(o)
        return GaussianInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussianInt.of(o) - self

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __mul__(self, o):
        if isinstance(o, CPoint):
            return CPoint.of(self) * o
        o = GaussianInt.of(o)
        return GaussianInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def normalized(self) -> "GaussianInt":
        """The associate with re > 0 and im >= 0 (zero maps to zero)."""
        g = self
        if g.is_zero():
            return g
        for _ in range(4):
            if g.re > 0 and g.im >= 0:
                return g
            g = GaussianInt(-g.im, g.re)  # multiply by i
        raise InvariantViolation("no normalized associate")

    def divides(self, o: "GaussianInt") -> bool:
        o = GaussianInt.of(o)
        if self.is_zero():
            return o.is_zero()
        n = self.norm()
        t = o * self.conj()
        return t.re % n == 0 and t.im % n == 0

    def __complex__(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"GaussianInt({self.re}, {self.im})"

    def __str__(self):
        return _fmt_complex(self.re, self.im)


def _fmt_complex(re_, im_) -> str:
    if im_ == 0:
        return str(re_)
    if re_ == 0:
        return f"{im_}i"
    sign = "+" if im_ > 0 else "-"
    return f"{re_}{sign}{abs(im_)}i"


def nearest_gaussian(z) -> GaussianInt:
    """Nearest Gaussian integer to a Gaussian rational, coordinate-wise ties down."""
    z = CPoint.of(z)
    return GaussianInt(round_half_down(z.re), round_half_down(z.im))


def gaussian_divmod(a, b):
    a, b = GaussianInt.of(a), GaussianInt.of(b)
    if b.is_zero():
        raise DomainError("division by zero Gaussian integer")
    q = nearest_gaussian(CPoint.of(a) / CPoint.of(b))
    r = a - q * b
    if 2 * r.norm() > b.norm():
        raise InvariantViolation("Euclidean remainder too large")
    return q, r


def gaussian_gcd(a, b) -> GaussianInt:
    """gcd normalized to re > 0, im >= 0; gcd(0, 0) = 0."""
    a, b = GaussianInt.of(a), GaussianInt.of(b)
    while not b.is_zero():
        _, r = gaussian_divmod(a, b)
        a, b = b, r
    return a.normalized()


# ---------------------------------------------------------------- Gaussian rationals


@dataclass(frozen=True, slots=True)
class CPoint:
    """A point of Q(i), stored as two exact rationals."""

    re: Fraction
    im: Fraction

    def __post_init__(self):
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @staticmethod
    def of(x) -> "CPoint":
        if isinstance(x, CPoint):
            return x
        if isinstance(x, GaussianInt):
            return CPoint(Fraction(x.re), Fraction(x.im))
        if isinstance(x, (int, Fraction)):
            return CPoint(Fraction(x), Fraction(0))
        if isinstance(x, GaussianRational):
            return x.to_cpoint()
        if isinstance(x, tuple) and len(x) == 2:
            return CPoint(as_fraction(x[0]), as_fraction(x[1]))
        raise DomainError(f"not a Gaussian rational: {x!r}")

    def __add__(self, o):
        o = CPoint.of(o)
        return CPoint(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = CPoint.of(o)
        return CPoint(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return CPoint.of(o) - self

    def __neg__(self):
        return CPoint(-self.re, -self.im)

    def __mul__(self, o):
        o = CPoint.of(o)
        return CPoint(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def scale(self, c: Fraction) -> "CPoint":
        return CPoint(self.re * c, self.im * c)

    def conj(self) -> "CPoint":
        return CPoint(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, o):
        o = CPoint.of(o)
        n = o.norm2()
        if n == 0:
            raise DomainError("division by zero")
        t = self * o.conj()
        return CPoint(t.re / n, t.im / n)

    def __rtruediv__(self, o):
        return CPoint.of(o) / self

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return _fmt_complex(self.re, self.im)


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """p/q in lowest terms with q normalized (re > 0, im >= 0)."""

    num: GaussianInt
    den: GaussianInt

    def to_cpoint(self) -> CPoint:
        return CPoint.of(self.num) / CPoint.of(self.den)

    def is_reduced(self) -> bool:
        return gaussian_gcd(self.num, self.den) == GaussianInt(1, 0)


def reduce(p, q) -> GaussianRational:
    p, q = GaussianInt.of(p), GaussianInt.of(q)
    if q.is_zero():
        raise DomainError("zero denominator")
    if p.is_zero():
        return GaussianRational(GaussianInt(0, 0), GaussianInt(1, 0))
    g = gaussian_gcd(p, q)
    p2, r1 = gaussian_divmod(p, g)
    q2, r2 = gaussian_divmod(q, g)
    if not (r1.is_zero() and r2.is_zero()):
        raise InvariantViolation("gcd does not divide")
    # move the unit so the denominator is normalized
    for _ in range(4):
        if q2.re > 0 and q2.im >= 0:
            break
        q2 = GaussianInt(-q2.im, q2.re)
        p2 = GaussianInt(-p2.im, p2.re)
    return GaussianRational(p2, q2)


# ---------------------------------------------------------------- quadratic surds


def _squarefree_check(d: int) -> None:
    if d < 2 or math.isqrt(d) ** 2 == d:
        raise DomainError(f"d must be a positive non-square, got {d}")


@dataclass(frozen=True, slots=True)
class QuadraticSurd:
    """(a + b*sqrt(d)) / c with integers, c > 0, gcd(a, b, c) = 1.

    ``b == 0`` is allowed so the class is closed under ring operations;
    such values are rationals carried inside the field Q(sqrt d).
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if c == 0:
            raise DomainError("zero denominator")
        _squarefree_check(d)
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)

    @staticmethod
    def sqrt(n, d_hint: int | None = None) -> "QuadraticSurd":
        n = as_fraction(n)
        if n <= 0:
            raise DomainError("sqrt of non-positive")
        # sqrt(p/q) = sqrt(p*q)/q, then pull out square factors
        m = n.numerator * n.denominator
        k, d = _square_split(m, d_hint)
        return QuadraticSurd(0, k, n.denominator, d)

    @staticmethod
    def golden() -> "QuadraticSurd":
        return QuadraticSurd(1, 1, 2, 5)

    def is_rational(self) -> bool:
        return self.b == 0

    def rational(self) -> Fraction:
        if self.b != 0:
            raise DomainError("surd is irrational")
        return Fraction(self.a, self.c)

    def _lift(self, o) -> "QuadraticSurd":
        if isinstance(o, QuadraticSurd):
            if o.d != self.d:
                raise DomainError(f"mixed quadratic fields sqrt{self.d} and sqrt{o.d}")
            return o
        f = as_fraction(o)
        return QuadraticSurd(f.numerator, 0, f.denominator, self.d)

    def __add__(self, o):
        o = self._lift(o)
        return QuadraticSurd(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c, self.c * o.c, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.c, self.d)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return QuadraticSurd(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.c * o.c, self.d
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.a, -self.b, self.c, self.d)

    def field_norm(self) -> Fraction:
        return Fraction(self.a * self.a - self.d * self.b * self.b, self.c * self.c)

    def reciprocal(self) -> "QuadraticSurd":
        n = self.a * self.a - self.d * self.b * self.b
        if n == 0:
            raise DomainError("division by zero")
        return QuadraticSurd(self.a * self.c, -self.b * self.c, n, self.d)

    def __truediv__(self, o):
        return self * self._lift(o).reciprocal()

    def __rtruediv__(self, o):
        return self._lift(o) * self.reciprocal()

    def __pow__(self, e: int):
        if e < 0:
            return self.reciprocal() ** (-e)
        out = self._lift(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sign(self) -> int:
        return _sign_a_plus_b_sqrt(self.a, self.b, self.d)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def floor(self) -> int:
        # floor((a + b sqrt d)/c) = floor((a + floor(b sqrt d))/c) since b sqrt d is irrational
        if self.b == 0:
            return self.a // self.c
        t = math.isqrt(self.b * self.b * self.d)
        fl = t if self.b > 0 else -t - 1
        return (self.a + fl) // self.c

    def __floor__(self):
        return self.floor()

    def _cmp(self, o) -> int:
        return (self - self._lift(o)).sign()

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, QuadraticSurd)):
            try:
                return self._cmp(o) == 0
            except DomainError:
                return False
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    def to_mpf(self, dps: int = 50):
        with mpmath.workdps(dps):
            return (mpmath.mpf(self.a) + self.b * mpmath.sqrt(self.d)) / self.c

    def __float__(self):
        return float(self.to_mpf(30))

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return str(Fraction(self.a, self.c))
        coef = "" if abs(self.b) == 1 else f"{abs(self.b)}*"
        if self.a == 0:
            num = f"{'-' if self.b < 0 else ''}{coef}sqrt({self.d})"
        else:
            num = f"{self.a}{'+' if self.b > 0 else '-'}{coef}sqrt({self.d})"
        return f"({num})/{self.c}" if self.c != 1 else num


def _square_split(m: int, d_hint: int | None = None) -> tuple[int, int]:
    """m = k^2 * d with d squarefree.

    A known field d_hint (or m a perfect square) is settled by one isqrt;
    otherwise trial division, fine for small inputs.
    """
    for d0 in (1, d_hint):
        if d0 and m % d0 == 0:
            k = math.isqrt(m // d0)
            if k * k * d0 == m:
                return k, d0
    k, d, p = 1, 1, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        if m % p == 0:
            m //= p
            d *= p
        p += 1
    return k, d * m


def _sign_a_plus_b_sqrt(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d)."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 d
    diff = a * a - b * b * d
    return sa if diff > 0 else (-sa if diff < 0 else 0)


# ---------------------------------------------------------------- generic helpers


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadraticSurd))


def exact_sign(x) -> int:
    if isinstance(x, QuadraticSurd):
        return x.sign()
    x = as_fraction(x)
    return (x > 0) - (x < 0)


def compare(x, y, dps: int = 60) -> int:
    """Sign of x - y. Exact for rationals and same-field surds.

    Other combinations are decided numerically at increasing precision;
    a tie that survives 600 digits is reported as 0.
    """
    try:
        if is_exact(x) and is_exact(y):
            if isinstance(x, QuadraticSurd):
                return x._cmp(y)
            if isinstance(y, QuadraticSurd):
                return -y._cmp(x)
            return exact_sign(as_fraction(x) - as_fraction(y))
    except DomainError:
        pass
    while dps <= 600:
        with mpmath.workdps(dps):
            diff = to_mpf(x, dps) - to_mpf(y, dps)
            if abs(diff) > mpmath.mpf(10) ** (-(dps - 10)):
                return 1 if diff > 0 else -1
        dps *= 2
    return 0


def to_mpf(x, dps: int = 50):
    if isinstance(x, QuadraticSurd):
        return x.to_mpf(dps)
    with mpmath.workdps(dps):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


def lower_fraction(x, digits: int = 30) -> Fraction:
    """A rational lower bound for a non-negative real x, tight to about `digits` digits."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    scale = 10**digits
    with mpmath.workdps(digits + 20):
        v = to_mpf(x, digits + 20)
        n = int(mpmath.floor(v * scale)) - 1
    return Fraction(max(n, 0), scale) if v >= 0 else Fraction(n, scale)


def upper_fraction(x, digits: int = 30) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    scale = 10**digits
    with mpmath.workdps(digits + 20):
        v = to_mpf(x, digits + 20)
        n = int(mpmath.ceil(v * scale)) + 1
    return Fraction(n, scale)


def sqrt_bounds(r: Fraction, digits: int = 30) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(r) <= hi with hi - lo <= 2 * 10**-digits."""
    r = as_fraction(r)
    if r < 0:
        raise DomainError("sqrt of negative")
    scale = 10**digits
    # isqrt on scaled integers gives a certified floor
    num = r.numerator * scale * scale
    lo = math.isqrt(num // r.denominator)
    lo_f = Fraction(lo, scale)
    while lo_f * lo_f > r:
        lo -= 1
        lo_f = Fraction(lo, scale)
    hi_f = Fraction(lo + 1, scale)
    while hi_f * hi_f < r:
        lo += 1
        hi_f = Fraction(lo + 1, scale)
    if lo_f * lo_f == r:
        hi_f = lo_f
    return lo_f, hi_f


_SURD_RE = re.compile(
    r"^\(?\s*([+-]?\d+)?\s*([+-])?\s*(\d+)?\s*\*?\s*sqrt\s*\(?\s*(\d+)\s*\)?\s*\)?\s*(?:/\s*(\d+))?$"
)


def parse_number(s) -> Number:
    """Parse "7/5", "-3", "phi", "sqrt(2)", "(1+sqrt(5))/2", "(3-2*sqrt(7))/5".

    JSON-style objects {"a":..,"b":..,"c":..,"d":..} are accepted too.
    """
    if isinstance(s, (int, Fraction, QuadraticSurd)):
        return s
    if isinstance(s, dict):
        return QuadraticSurd(int(s["a"]), int(s["b"]), int(s.get("c", 1)), int(s["d"]))
    if isinstance(s, (list, tuple)) and len(s) == 4:
        return QuadraticSurd(*(int(v) for v in s))
    if not isinstance(s, str):
        raise DomainError(f"cannot parse number {s!r}")
    t = s.strip().lower().replace(" ", "")
    if t in ("phi", "golden"):
        return QuadraticSurd.golden()
    if "sqrt" not in t:
        try:
            return Fraction(t)
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"cannot parse number {s!r}") from e
    m = _SURD_RE.match(t)
    if not m:
        raise DomainError(f"cannot parse surd {s!r}")
    a_s, sign, b_s, d_s, c_s = m.groups()
    a = int(a_s) if a_s else 0
    if a_s and sign is None and b_s is None:
        # "2sqrt(3)" style: the leading integer is the coefficient
        b, a = a, 0
    else:
        b = int(b_s) if b_s else 1
        if sign == "-":
            b = -b
    c = int(c_s) if c_s else 1
    d = int(d_s)
    k, d0 = _square_split(d)
    if d0 == 1:
        return Fraction(a + b * k, c)
    return QuadraticSurd(a, b * k, c, d0)


def format_number(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    return str(x)
