"""Hausdorff dimension of limsup sets: closed forms, cover sums, estimators.

Closed forms are exact rationals. Numerical estimators only serve as
cross-checks and are never trusted over a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .arith import DomainError
from .resonant import shell_counts


class Kind(str, Enum):
    REAL = "real_Wv"
    SIMULTANEOUS = "simultaneous"
    LINEAR_FORMS = "linear_forms"
    COMPLEX = "complex_Wv"
    ABSOLUTE = "absolute_Lhat"
    MULTIPLICATIVE = "multiplicative_E"


@dataclass(frozen=True)
class LimsupSetDescriptor:
    kind: Kind
    v: Fraction
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "v", Fraction(self.v))
        if self.v <= 0:
            raise DomainError("v must be positive")
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.kind in (Kind.REAL, Kind.COMPLEX) and self.n != 1:
            raise DomainError(f"{self.kind.value} has n = 1")

    @property
    def ambient(self) -> int:
        if self.kind == Kind.COMPLEX:
            return 2
        if self.kind == Kind.MULTIPLICATIVE:
            return 2 * self.n
        return self.n


def closed_form_dimension(d: LimsupSetDescriptor) -> Fraction:
    v, n, k = d.v, d.n, d.kind
    if k == Kind.REAL:
        return Fraction(2) / (v + 1) if v >= 1 else Fraction(1)
    if k == Kind.SIMULTANEOUS:
        return Fraction(n + 1) / (v + 1) if v >= Fraction(1, n) else Fraction(n)
    if k == Kind.LINEAR_FORMS:
        return n - 1 + Fraction(n + 1) / (v + 1) if v > n else Fraction(n)
    if k == Kind.COMPLEX:
        return Fraction(4) / (v + 1) if v >= 1 else Fraction(2)
    if k == Kind.ABSOLUTE:
        return n - 1 + Fraction(n) / (v + 1) if v > n - 1 else Fraction(n)
    if k == Kind.MULTIPLICATIVE:
        return 2 * (n - 1) + Fraction(n + 1) / (v + 1) if v > Fraction(n - 1, 2) else Fraction(2 * n)
    raise DomainError(f"unknown kind {k}")


# ---------------------------------------------------------------- cover sums


@dataclass
class CoverSumSeries:
    """Partial sums of the s-length of the natural cover, at checkpoints Q."""

    s: float
    Qs: np.ndarray
    sums: np.ndarray
    blocks: list = field(default_factory=list)  # (Q_lo, block sum) for dyadic blocks

    def growth_exponent(self, last: int = 4) -> float:
        """Slope of log(block sum) against log Q over the last dyadic blocks."""
        pts = [(math.log(q), math.log(b)) for q, b in self.blocks if b > 0][-last:]
        if len(pts) < 2:
            raise DomainError("need at least two dyadic blocks")
        x = np.array([p[0] for p in pts])
        y = np.array([p[1] for p in pts])
        return float(np.polyfit(x, y, 1)[0])


_COVERABLE = (Kind.REAL, Kind.COMPLEX, Kind.SIMULTANEOUS)


def _terms(d: LimsupSetDescriptor, s: float, Q: int) -> np.ndarray:
    """Cover terms for q (or the shell |q| ~ k) from 2 to Q."""
    v = float(d.v)
    k = np.arange(2, Q + 1, dtype=np.float64)
    base = s * (math.log(2) - (v + 1) * np.log(k))  # log diam^s
    if d.kind == Kind.REAL:
        return (k + 1) * np.exp(base)
    if d.kind == Kind.SIMULTANEOUS:
        n = d.n
        return (k + 1) ** n * np.exp(s * (math.log(2 * math.sqrt(n)) - (v + 1) * np.log(k)))
    if d.kind == Kind.COMPLEX:
        # each q contributes |q|^2 discs; shells k <= |q| < k+1
        sc = _shells(Q)[2 : Q + 1].astype(np.float64)
        return sc * k * k * np.exp(base)
    raise DomainError(f"no cover sum for {d.kind.value}; use the closed form")


_SHELLS: dict[int, np.ndarray] = {}


def _shells(Q: int) -> np.ndarray:
    for K, arr in _SHELLS.items():
        if K >= Q:
            return arr
    arr = shell_counts(Q)
    _SHELLS[Q] = arr
    return arr


def cover_s_length(d: LimsupSetDescriptor, s: float, Q: int) -> CoverSumSeries:
    if d.kind not in _COVERABLE:
        raise DomainError(f"no cover sum for {d.kind.value}; use the closed form")
    if Q < 2:
        raise DomainError("Q must be >= 2")
    if s < 0:
        raise DomainError("s must be >= 0")
    terms = _terms(d, s, Q)
    csum = np.cumsum(terms)
    checkpoints = sorted({2**j for j in range(1, int(math.log2(Q)) + 1)} | {Q})
    Qs = np.array(checkpoints)
    sums = csum[Qs - 2]
    blocks = []
    j = 1
    while 2 ** (j + 1) <= Q:
        lo, hi = 2**j, 2 ** (j + 1)
        blocks.append((lo, float(terms[lo - 2 : hi - 2].sum())))
        j += 1
    return CoverSumSeries(s, Qs, sums, blocks)


def classify(d: LimsupSetDescriptor, s: float, Qmax: int) -> tuple[str, float]:
    """("growing" | "bounded", fitted growth exponent of the dyadic block sums)."""
    e = cover_s_length(d, s, Qmax).growth_exponent()
    return ("growing" if e >= 0 else "bounded"), e


def critical_exponent_estimate(d: LimsupSetDescriptor, Qmax: int = 10_000, tol: float = 1e-3) -> Fraction:
    """Bisection for the s where the cover sum turns from growing to bounded.

    Growth is measured by the fitted exponent of dyadic block sums, so the
    decision does not depend on where a partial sum happens to sit.
    """
    hi = float(d.ambient)
    if classify(d, hi, Qmax)[0] == "growing":
        return Fraction(d.ambient)
    lo = 0.0
    if classify(d, lo, Qmax)[0] == "bounded":
        return Fraction(0)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if classify(d, mid, Qmax)[0] == "growing":
            lo = mid
        else:
            hi = mid
    return Fraction((lo + hi) / 2).limit_denominator(10**6)


# ---------------------------------------------------------------- box counting


@dataclass
class BoxCountResult:
    slope: float
    residual: float
    counts: list[tuple[int, int]]


def box_counting_estimate(
    intersects: Callable[[tuple, Fraction], bool], depths: Sequence[int], dim: int = 1
) -> BoxCountResult:
    """Slope of log #boxes against depth * log 2 over dyadic grids of [0,1)^dim.

    ``intersects(corner, side)`` decides whether the set meets the box with
    the given lower corner (a tuple of Fractions) and side 2^-depth.
    """
    counts = []
    for j in depths:
        side = Fraction(1, 2**j)
        m = 2**j

        def boxes(level):
            if level == dim:
                yield ()
                return
            for rest in boxes(level + 1):
                for i in range(m):
                    yield (Fraction(i, m),) + rest

        c = sum(1 for box in boxes(0) if intersects(box, side))
        counts.append((j, c))
    x = np.array([j * math.log(2) for j, c in counts if c > 0])
    y = np.array([math.log(c) for j, c in counts if c > 0])
    if len(x) < 2:
        return BoxCountResult(0.0, 0.0, counts)
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return BoxCountResult(float(coef[0]), resid, counts)


# ---------------------------------------------------------------- ubiquity and Jarnik


def ubiquity_lower_bound(rho, psi_exponent, dimR: int, codimR: int) -> Fraction:
    """dim R + codim R * limsup log rho(N) / log Psi(N) for power-law data.

    rho = (c, a, b) means rho(N) = c N^-a (log N)^b; Psi(N) = N^-(psi_exponent + 1).
    The log factor does not change the ratio of orders.
    """
    if callable(rho) or not isinstance(rho, (tuple, list)) or len(rho) != 3:
        raise DomainError("rho must be a power-law triple (c, a, b)")
    c, a, b = rho
    a = Fraction(a)
    v = Fraction(psi_exponent)
    if a <= 0 or v + 1 <= 0:
        raise DomainError("need decaying rho and Psi")
    if Fraction(c) <= 0:
        raise DomainError("c must be positive")
    return dimR + codimR * a / (v + 1)


def jarnik_MN_bounds(N: int) -> tuple[float, float]:
    """Bounds for dim M_N, the numbers with partial quotients at most N."""
    if N < 8:
        raise DomainError("bounds stated for N >= 8")
    return 1 - 4 / (N * math.log(2)), 1 - 1 / (8 * N * math.log(N))
