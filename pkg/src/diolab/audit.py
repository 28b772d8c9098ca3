"""Small-divisor audits for the classical Diophantine conditions.

Each audit enumerates the index set up to J, computes the margin
|small divisor| * weight^v for every index, and reports the smallest one.

Inputs are rationals or surds from one quadratic field Q(sqrt d). Values are
then integer pairs (X, Y) standing for (X + Y sqrt d)/C, so an exact
resonance is simply X = Y = 0. Floats only rank the margins; the minimum is
re-decided exactly (or at high precision when v is not a half-integer) and
K_observed is a certified rational lower bound of the true minimum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .arith import CPoint, DomainError, QuadraticSurd, compare, lower_fraction, parse_number, to_mpf
from .dimlab import Kind, LimsupSetDescriptor, closed_form_dimension

__all__ = [
    "AuditReport",
    "rotation_audit",
    "pde_ratio_audit",
    "multiplicative_type_audit",
    "additive_type_audit",
    "kam_frequency_audit",
    "fourier_decay_bound",
    "fit_exponent",
]

MAX_INDICES = 5_000_000


@dataclass
class AuditReport:
    condition_kind: str
    J: int
    v: Fraction
    K_observed: Fraction  # certified lower bound, exact when rational
    K_value: float
    worst_witness: tuple
    exceptional_dimension: Fraction
    exact_resonance: bool
    indices: int
    K_exact_sq: object = None  # exact square of the minimal margin when available
    extra: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        K = self.K_observed
        return {
            "condition_kind": self.condition_kind,
            "J": self.J,
            "v": f"{self.v.numerator}/{self.v.denominator}",
            "K_observed": f"{K.numerator}/{K.denominator}",
            "K_value": self.K_value,
            "worst_witness": _plain(self.worst_witness),
            "exceptional_dimension": f"{self.exceptional_dimension.numerator}/{self.exceptional_dimension.denominator}",
            "exact_resonance": self.exact_resonance,
            "indices": self.indices,
            **self.extra,
        }


def _plain(x):
    if isinstance(x, (tuple, list)):
        return [_plain(y) for y in x]
    if isinstance(x, np.integer):
        return int(x)
    return x


# ---------------------------------------------------------------- field representation


def _field_rep(values: Sequence) -> tuple[Optional[int], list[tuple[int, int]], int]:
    """value_r = (A_r + B_r sqrt d) / C with one common C."""
    vals = [parse_number(v) for v in values]
    ds = {v.d for v in vals if isinstance(v, QuadraticSurd) and not v.is_rational()}
    if len(ds) > 1:
        raise DomainError(f"inputs mix quadratic fields {sorted(ds)}; use one field")
    d = ds.pop() if ds else None
    parts = []
    for v in vals:
        if isinstance(v, QuadraticSurd):
            parts.append((Fraction(v.a, v.c), Fraction(v.b, v.c)))
        else:
            parts.append((Fraction(v), Fraction(0)))
    C = 1
    for a, b in parts:
        C = math.lcm(C, a.denominator, b.denominator)
    return d, [(int(a * C), int(b * C)) for a, b in parts], C


def _value(X: int, Y: int, C: int, d: Optional[int]):
    if d is None or Y == 0:
        return Fraction(X, C)
    return QuadraticSurd(X, Y, C, d)


def _safe(*arrs) -> bool:
    return all(a.size == 0 or int(np.abs(a).max()) < 2**30 for a in arrs)


def _wide(*arrs):
    """Python-int object arrays, for inputs whose products leave int64."""
    return [np.array([int(x) for x in a.ravel().tolist()], dtype=object).reshape(a.shape) for a in arrs]


def _abs_field(X: np.ndarray, Y: np.ndarray, d: Optional[int]) -> np.ndarray:
    """|X + Y sqrt d| in floats, without cancellation."""
    Xf = X.astype(np.float64)
    if d is None:
        return np.abs(Xf)
    Yf = Y.astype(np.float64)
    sd = math.sqrt(d)
    out = np.abs(Xf) + np.abs(Yf) * sd
    opp = (X > 0) & (Y < 0) | (X < 0) & (Y > 0)
    if opp.any():
        Xo, Yo = X[opp], Y[opp]
        if _safe(Xo, Yo):
            num = Xo * Xo - d * Yo * Yo
            numf = num.astype(np.float64)
        else:
            numf = np.array([float(int(a) * int(a) - d * int(b) * int(b)) for a, b in zip(Xo, Yo)])
        out[opp] = np.abs(numf) / out[opp]
    return out


def _floor_field(U: np.ndarray, V: np.ndarray, C: int, d: Optional[int]) -> np.ndarray:
    """Exact floor((U + V sqrt d) / C) elementwise, C > 0."""
    if d is None:
        return np.floor_divide(U, C)
    if U.dtype == object or V.dtype == object:
        fl = [math.isqrt(int(b) * int(b) * d) for b in V.tolist()]
        fl = [f if b >= 0 else (-f - 1 if b < 0 else 0) for f, b in zip(fl, V.tolist())]
        fl = [0 if b == 0 else f for f, b in zip(fl, V.tolist())]
        return np.floor_divide(U + np.array(fl, dtype=object), C)
    m = V * V * d
    s = np.floor(np.sqrt(m.astype(np.float64))).astype(np.int64)
    s = np.where(s * s > m, s - 1, s)
    s = np.where((s + 1) * (s + 1) <= m, s + 1, s)
    # floor(V sqrt d): s when V >= 0, -s - 1 when V < 0 (irrational unless V = 0)
    fl = np.where(V > 0, s, np.where(V < 0, -s - 1, 0))
    return np.floor_divide(U + fl, C)


# ---------------------------------------------------------------- exact minimum


def _margin_sq(val, weight: int, v: Fraction):
    """(|val| weight^v)^2, exact when 2v is an integer, else an mpf."""
    two_v = 2 * v
    sq = val * val
    if two_v.denominator == 1:
        return sq * Fraction(weight) ** int(two_v)
    with mpmath.workdps(60):
        return to_mpf(sq, 60) * mpmath.mpf(weight) ** (mpmath.mpf(two_v.numerator) / two_v.denominator)


def _pick_min(margins_f: np.ndarray, exact_of, witnesses) -> tuple:
    """Exact argmin among the float near-minimal entries, ties by witness order."""
    m = margins_f.min()
    near = np.nonzero(margins_f <= m * (1 + 1e-6) + 1e-300)[0]
    best_i, best = None, None
    for i in near.tolist():
        e = exact_of(i)
        if best is None:
            best_i, best = i, e
            continue
        c = compare(e, best)
        if c < 0 or (c == 0 and tuple(witnesses(i)) < tuple(witnesses(best_i))):
            best_i, best = i, e
    return best_i, best


def _K_from_sq(sq) -> tuple[Fraction, float]:
    if isinstance(sq, Fraction) and sq == 0:
        return Fraction(0), 0.0
    if isinstance(sq, QuadraticSurd) and sq.sign() == 0:
        return Fraction(0), 0.0
    if isinstance(sq, Fraction):
        rn, rd = math.isqrt(sq.numerator), math.isqrt(sq.denominator)
        if rn * rn == sq.numerator and rd * rd == sq.denominator:
            return Fraction(rn, rd), rn / rd
    with mpmath.workdps(60):
        root = mpmath.sqrt(to_mpf(sq, 60) if not isinstance(sq, mpmath.mpf) else sq)
        # keep about 30 significant digits, so a tiny positive K never rounds to 0
        digits = 30 + max(0, int(-mpmath.floor(mpmath.log10(root))))
        return lower_fraction(root, digits), float(root)


def _report(kind, J, v, sq, witness, dim, resonance, count, extra=None) -> AuditReport:
    K, Kf = _K_from_sq(sq)
    exact_sq = sq if isinstance(sq, (Fraction, QuadraticSurd)) else None
    return AuditReport(kind, J, v, K, Kf, witness, dim, resonance, count, exact_sq, extra or {})


def _dim(kind: Kind, v: Fraction, n: int = 1) -> Fraction:
    return closed_form_dimension(LimsupSetDescriptor(kind, v, n))


# ---------------------------------------------------------------- audits


def rotation_audit(rho, J: int, v=1) -> AuditReport:
    """min over 1 <= k <= J of ||k rho|| k^v."""
    v = Fraction(v)
    if J < 1:
        raise DomainError("J must be >= 1")
    d, [(A, B)], C = _field_rep([rho])
    k = np.arange(1, J + 1, dtype=np.int64)
    if J * max(abs(A), abs(B), C, 1) * 4 >= 2**30:
        (k,) = _wide(k)
    # nearest integer j = floor(k rho + 1/2) = floor((2kA + C + 2kB sqrt d) / (2C))
    j = _floor_field(2 * k * A + C, 2 * k * B, 2 * C, d)
    X = k * A - j * C
    Y = k * B
    vf = float(v)
    mf = _abs_field(X, Y, d) / C * k.astype(np.float64) ** vf
    res = bool(np.any((X == 0) & (Y == 0)))

    def exact(i):
        return _margin_sq(_value(int(X[i]), int(Y[i]), C, d), int(k[i]), v)

    i, sq = _pick_min(mf, exact, lambda i: (int(k[i]),))
    return _report("rotation", J, v, sq, (int(k[i]), int(j[i])), _dim(Kind.REAL, v), res, J)


def pde_ratio_audit(z, J: int, v=1) -> AuditReport:
    """min over 0 < |q| <= J of |z - p/q| |q|^(v+1), p the nearest Gaussian integer to q z.

    z is a Gaussian rational or a pair (re, im) from one quadratic field.
    """
    v = Fraction(v)
    if v < 1:
        raise DomainError("need v >= 1")
    if isinstance(z, CPoint):
        comps = [z.re, z.im]
    elif isinstance(z, (tuple, list)) and len(z) == 2:
        comps = list(z)
    else:
        raise DomainError("z must be a CPoint or a pair (re, im)")
    d, [(Ar, Br), (Ai, Bi)], C = _field_rep(comps)
    from .resonant import normalized_denominators

    pairs = normalized_denominators(1, J * J, strict_hi=False)
    q1, q2 = pairs[:, 0], pairs[:, 1]
    if max(abs(Ar), abs(Br), abs(Ai), abs(Bi), C, 1) * J * 8 >= 2**30:
        q1, q2 = _wide(q1, q2)
    Ur, Vr = q1 * Ar - q2 * Ai, q1 * Br - q2 * Bi  # Re(q z) * C
    Ui, Vi = q2 * Ar + q1 * Ai, q2 * Br + q1 * Bi  # Im(q z) * C
    p1 = _floor_field(2 * Ur + C, 2 * Vr, 2 * C, d)
    p2 = _floor_field(2 * Ui + C, 2 * Vi, 2 * C, d)
    Xr, Xi = Ur - p1 * C, Ui - p2 * C
    nq = (q1 * q1 + q2 * q2).astype(np.float64)
    dist = np.hypot(_abs_field(Xr, Vr, d), _abs_field(Xi, Vi, d)) / C  # |q z - p|
    mf = dist * nq ** (float(v) / 2)  # = |z - p/q| |q|^(v+1)
    res = bool(np.any((Xr == 0) & (Vr == 0) & (Xi == 0) & (Vi == 0)))

    def exact(i):
        re_ = _value(int(Xr[i]), int(Vr[i]), C, d)
        im_ = _value(int(Xi[i]), int(Vi[i]), C, d)
        sq = re_ * re_ + im_ * im_  # |q z - p|^2
        n = int(q1[i]) ** 2 + int(q2[i]) ** 2
        if v.denominator == 1:
            return sq * Fraction(n) ** int(v)
        with mpmath.workdps(60):
            return to_mpf(sq, 60) * mpmath.mpf(n) ** (mpmath.mpf(v.numerator) / v.denominator)

    i, sq = _pick_min(mf, exact, lambda i: (int(q1[i]) ** 2 + int(q2[i]) ** 2, int(q1[i]), int(q2[i])))
    w = ((int(q1[i]), int(q2[i])), (int(p1[i]), int(p2[i])))
    return _report("pde_ratio", J, v, sq, w, _dim(Kind.COMPLEX, v), res, len(pairs))


def _coeffs(rep, J: int):
    big = max(max(abs(a), abs(b)) for a, b in rep) * J * 4 >= 2**30
    dt = object if big else np.int64
    return (np.array([int(r[0]) for r in rep], dtype=dt), np.array([int(r[1]) for r in rep], dtype=dt))


def _compositions(n: int, J: int, lo: int = 2) -> np.ndarray:
    """All j in N0^n with lo <= |j|_1 <= J."""
    total = math.comb(J + n, n)
    if total > MAX_INDICES:
        raise DomainError(f"{total} indices exceed the audit budget; lower J")
    if n == 1:
        return np.arange(lo, J + 1, dtype=np.int64)[:, None]
    rows = []
    for first in range(J + 1):
        rest = _compositions_all(n - 1, J - first)
        rows.append(np.concatenate([np.full((rest.shape[0], 1), first, dtype=np.int64), rest], axis=1))
    out = np.concatenate(rows)
    return out[out.sum(axis=1) >= lo]


def _compositions_all(n: int, J: int) -> np.ndarray:
    if n == 1:
        return np.arange(J + 1, dtype=np.int64)[:, None]
    rows = []
    for first in range(J + 1):
        rest = _compositions_all(n - 1, J - first)
        rows.append(np.concatenate([np.full((rest.shape[0], 1), first, dtype=np.int64), rest], axis=1))
    return np.concatenate(rows)


def additive_type_audit(lam: Sequence, J: int, v) -> AuditReport:
    """min over k and j (|j|_1 in [2, J]) of |lam_k - sum_r lam_r j_r| |j|_1^v."""
    v = Fraction(v)
    n = len(lam)
    if n < 1:
        raise DomainError("need at least one value")
    d, rep, C = _field_rep(lam)
    js = _compositions(n, J)
    A, B = _coeffs(rep, J)
    if A.dtype == object:
        (js,) = _wide(js)
    SA, SB = js @ A, js @ B
    w = js.sum(axis=1)
    best = None
    res = False
    for k in range(n):
        X, Y = A[k] - SA, B[k] - SB
        res = res or bool(np.any((X == 0) & (Y == 0)))
        mf = _abs_field(X, Y, d) / C * w.astype(np.float64) ** float(v)

        def exact(i, X=X, Y=Y):
            return _margin_sq(_value(int(X[i]), int(Y[i]), C, d), int(w[i]), v)

        i, sq = _pick_min(mf, exact, lambda i: tuple(js[i].tolist()))
        if best is None or compare(sq, best[1]) < 0:
            best = ((k + 1, tuple(js[i].tolist())), sq)
    dim = _dim(Kind.ABSOLUTE, v, n)
    return _report("additive", J, v, best[1], best[0], dim, res, n * len(js))


def kam_frequency_audit(omega: Sequence, J: int, v) -> AuditReport:
    """min over nonzero q in Z^n with |q|_1 <= J of |q . omega| |q|_1^v."""
    v = Fraction(v)
    n = len(omega)
    d, rep, C = _field_rep(omega)
    qs = _half_lattice(n, J)
    A, B = _coeffs(rep, J)
    if A.dtype == object:
        (qs,) = _wide(qs)
    X, Y = qs @ A, qs @ B
    w = np.abs(qs).sum(axis=1)
    mf = _abs_field(X, Y, d) / C * w.astype(np.float64) ** float(v)
    res = bool(np.any((X == 0) & (Y == 0)))

    def exact(i):
        return _margin_sq(_value(int(X[i]), int(Y[i]), C, d), int(w[i]), v)

    i, sq = _pick_min(mf, exact, lambda i: (int(w[i]),) + tuple(qs[i].tolist()))
    return _report("kam_linear", J, v, sq, tuple(qs[i].tolist()), _dim(Kind.ABSOLUTE, v, n), res, len(qs))


def _half_lattice(n: int, J: int) -> np.ndarray:
    """Nonzero q with |q|_1 <= J and first nonzero coordinate positive (q and -q agree)."""
    # count of Z^n points in the l1 ball, halved
    total = sum(2**i * math.comb(n, i) * math.comb(J, i) for i in range(n + 1)) // 2
    if total > MAX_INDICES:
        raise DomainError(f"{total} indices exceed the audit budget; lower J")
    r = np.arange(-J, J + 1, dtype=np.int64)
    if n == 1:
        q = r[r > 0][:, None]
        return q
    grids = np.meshgrid(*([r] * n), indexing="ij")
    q = np.stack([g.ravel() for g in grids], axis=1)
    q = q[np.abs(q).sum(axis=1) <= J]
    nz = q != 0
    first = np.argmax(nz, axis=1)
    lead = q[np.arange(len(q)), first]
    keep = nz.any(axis=1) & (lead > 0)
    return q[keep]


def multiplicative_type_audit(alpha: Sequence, J: int, v) -> AuditReport:
    """min over k and j (|j|_1 in [2, J]) of |alpha_k - prod_r alpha_r^j_r| |j|_1^v.

    Entries are Gaussian rationals (CPoint) or numbers of one real quadratic
    field. Products are formed exactly, so planted resonances give 0.
    """
    v = Fraction(v)
    n = len(alpha)
    if not 1 <= n <= 4:
        raise DomainError("multiplicative audit supports 1 <= n <= 4")
    complex_in = any(isinstance(a, CPoint) for a in alpha)
    vals = [CPoint.of(a) if complex_in else parse_number(a) for a in alpha]
    if not complex_in:
        _field_rep(vals)  # checks a single field
    js = _compositions(n, J)
    powers = [[None] * (J + 1) for _ in range(n)]
    for r in range(n):
        one = CPoint(1, 0) if complex_in else Fraction(1)
        powers[r][0] = one
        for e in range(1, J + 1):
            powers[r][e] = powers[r][e - 1] * vals[r]
    best = None
    res = False
    two_v = 2 * v
    for idx in range(len(js)):
        j = js[idx].tolist()
        prod = powers[0][j[0]]
        for r in range(1, n):
            prod = prod * powers[r][j[r]]
        w = sum(j)
        for k in range(n):
            diff = vals[k] - prod
            sq = diff.norm2() if complex_in else diff * diff
            if compare(sq, 0) == 0:
                res = True
            if two_v.denominator == 1:
                m2 = sq * Fraction(w) ** int(two_v)
            else:
                with mpmath.workdps(60):
                    m2 = to_mpf(sq, 60) * mpmath.mpf(w) ** (mpmath.mpf(two_v.numerator) / two_v.denominator)
            if best is None or compare(m2, best[1]) < 0:
                best = ((k + 1, tuple(j)), m2)
    dim = _dim(Kind.MULTIPLICATIVE, v, n)
    return _report("multiplicative", J, v, best[1], best[0], dim, res, n * len(js))


# ---------------------------------------------------------------- consequences


@dataclass
class FourierBound:
    table: list  # (s, bound on |coefficient| at shell s)
    decay_order: Fraction
    bounded_second_derivatives: bool
    summable_second_derivatives: bool


def fourier_decay_bound(g_decay: tuple, audit: AuditReport, alpha_abs=1, lattice_dim: int = 4) -> FourierBound:
    """Coefficient bounds for a solution u of a constant-coefficient PDE with
    small divisors bounded below by K |j|^-v and data decaying like C |j|^-M.

    |u_j| <= C |j|^(v - M) / (|alpha| K). Second derivatives gain |j|^2: they
    are termwise bounded when M - v >= 2, and the series converges absolutely
    over the lattice when M - v - 2 > lattice_dim.
    """
    K = audit.K_observed
    if K <= 0:
        raise DomainError("resonant input: no decay bound")
    C, M = (Fraction(x) for x in g_decay)
    alpha_abs = Fraction(alpha_abs)
    if alpha_abs <= 0:
        raise DomainError("|alpha| must be positive")
    order = M - audit.v
    table = []
    for s in range(1, audit.J + 1):
        table.append((s, float(C) * s ** float(audit.v - M) / (float(alpha_abs) * float(K))))
    return FourierBound(table, order, order >= 2, order - 2 > lattice_dim)


def fit_exponent(kind: str, data, J: int, v_grid: Sequence, threshold) -> tuple[Optional[Fraction], list]:
    """Smallest v on the grid whose audit clears K_observed >= threshold."""
    fns = {
        "rotation": rotation_audit,
        "pde": pde_ratio_audit,
        "pde_ratio": pde_ratio_audit,
        "multiplicative": multiplicative_type_audit,
        "siegel": multiplicative_type_audit,
        "additive": additive_type_audit,
        "kam": kam_frequency_audit,
        "kam_linear": kam_frequency_audit,
    }
    if kind not in fns:
        raise DomainError(f"unknown audit kind {kind!r}")
    threshold = Fraction(threshold)
    rows = []
    found = None
    for v in sorted(Fraction(x) for x in v_grid):
        rep = fns[kind](data, J, v)
        rows.append((v, rep.K_observed))
        if found is None and rep.K_observed >= threshold:
            found = v
    return found, rows
