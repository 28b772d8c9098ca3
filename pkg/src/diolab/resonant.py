"""Resonant sets of Gaussian rationals in the unit square and their neighbourhoods.

R(q) is the set of points p/q reduced mod Z[i] into I = [0,1)^2. Areas of
unions of discs are reported as a sandwich: cells of a uniform grid lying
inside some disc give a lower bound, cells meeting some disc give an upper
bound, and the fraction of cell centres covered is the point estimate.

Float comparisons in the rasteriser carry a relative safety margin so the
sandwich stays valid; every predicate in the coverage search is checked in
integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .arith import CPoint, DomainError, GaussianInt

__all__ = [
    "ResonantSet",
    "resonant_set",
    "count_by_definition",
    "gauss_circle_count",
    "lattice_count_below",
    "shell_counts",
    "MeasureBounds",
    "DiscRaster",
    "neighborhood_measure",
    "small_denominator_measure",
    "CoverageReport",
    "ubiquity_coverage",
    "normalized_denominators",
]


@dataclass(frozen=True)
class ResonantSet:
    """Points (x_k/n, y_k/n) of R(q), with n = |q|^2."""

    q: GaussianInt
    n: int
    xs: np.ndarray
    ys: np.ndarray

    def __len__(self):
        return int(self.xs.size)

    def points(self) -> list[CPoint]:
        n = self.n
        return [CPoint(Fraction(int(x), n), Fraction(int(y), n)) for x, y in zip(self.xs, self.ys)]

    def as_floats(self) -> tuple[np.ndarray, np.ndarray]:
        return self.xs / self.n, self.ys / self.n


def _residues(q1: int, q2: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Numerators of p/q mod Z[i] over the residue system a + ib, a < n/g, b < g."""
    n = q1 * q1 + q2 * q2
    g = math.gcd(q1, q2)
    a = np.arange(n // g, dtype=np.int64)
    b = np.arange(g, dtype=np.int64)
    A, B = np.meshgrid(a, b, indexing="ij")
    A, B = A.ravel(), B.ravel()
    # p/q = p conj(q) / n
    xs = (A * q1 + B * q2) % n
    ys = (B * q1 - A * q2) % n
    return xs, ys, n


def resonant_set(q) -> ResonantSet:
    q = GaussianInt.of(q)
    if q.is_zero():
        raise DomainError("q must be nonzero")
    xs, ys, n = _residues(q.re, q.im)
    return ResonantSet(q, n, xs, ys)


def count_by_definition(q) -> int:
    """#{p in Z[i] : p/q in [0,1)^2}, scanning the box that contains q * I."""
    q = GaussianInt.of(q)
    n = q.norm()
    if n == 0:
        raise DomainError("q must be nonzero")
    corners = [(0, 0), (q.re, q.im), (-q.im, q.re), (q.re - q.im, q.im + q.re)]
    xs = [c[0] for c in corners]
    ys = [c[1] for c in corners]
    a = np.arange(min(xs), max(xs) + 1, dtype=np.int64)
    b = np.arange(min(ys), max(ys) + 1, dtype=np.int64)
    A, B = np.meshgrid(a, b, indexing="ij")
    X = A * q.re + B * q.im
    Y = B * q.re - A * q.im
    inside = (X >= 0) & (X < n) & (Y >= 0) & (Y < n)
    return int(inside.sum())


def gauss_circle_count(k: int) -> int:
    """#{q in Z[i] : 0 < |q| <= k}."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return lattice_count_below(k * k + 1) - 1


def lattice_count_below(m: int) -> int:
    """#{q in Z[i] : |q|^2 < m}, zero included."""
    if m <= 0:
        return 0
    t = m - 1
    r = math.isqrt(t)
    x = np.arange(-r, r + 1, dtype=np.int64)
    rest = t - x * x
    s = np.floor(np.sqrt(rest.astype(np.float64))).astype(np.int64)
    # exact integer square roots
    s = np.where(s * s > rest, s - 1, s)
    s = np.where((s + 1) * (s + 1) <= rest, s + 1, s)
    return int((2 * s + 1).sum())


def shell_counts(K: int) -> np.ndarray:
    """c[k] = #{q : k <= |q| < k+1} for k = 0..K."""
    below = np.array([lattice_count_below(k * k) for k in range(K + 2)], dtype=np.int64)
    return below[1:] - below[:-1]


def normalized_denominators(lo2: float, hi2: float, strict_hi: bool = True) -> np.ndarray:
    """Normalized q (re > 0, im >= 0) with lo2 <= |q|^2 < hi2 (or <= when not strict)."""
    K = int(math.isqrt(int(math.ceil(hi2)))) + 1
    a = np.arange(1, K + 1, dtype=np.int64)
    b = np.arange(0, K + 1, dtype=np.int64)
    A, B = np.meshgrid(a, b, indexing="ij")
    A, B = A.ravel(), B.ravel()
    n = A * A + B * B
    keep = (n >= lo2) & ((n < hi2) if strict_hi else (n <= hi2))
    A, B, n = A[keep], B[keep], n[keep]
    order = np.lexsort((B, A, n))
    return np.stack([A[order], B[order]], axis=1)


# ---------------------------------------------------------------- rasterising


@dataclass
class MeasureBounds:
    inner: Fraction
    outer: Fraction
    estimate: Fraction
    resolution: int

    def __post_init__(self):
        if not (self.inner <= self.estimate <= self.outer):
            raise ValueError("sandwich out of order")

    def as_record(self) -> dict:
        return {
            "inner": f"{self.inner.numerator}/{self.inner.denominator}",
            "outer": f"{self.outer.numerator}/{self.outer.denominator}",
            "estimate": f"{self.estimate.numerator}/{self.estimate.denominator}",
            "resolution": self.resolution,
        }


_REL = 1e-9  # relative safety margin on squared distances


class DiscRaster:
    """Accumulates open discs clipped to [0,1)^2 on a res x res grid."""

    def __init__(self, res: int):
        if res < 1:
            raise DomainError("resolution must be >= 1")
        self.res = res
        self.inner = np.zeros(res * res, dtype=bool)
        self.outer = np.zeros(res * res, dtype=bool)
        self.centre = np.zeros(res * res, dtype=bool)

    def add(self, cx: np.ndarray, cy: np.ndarray, r: np.ndarray, wrap: bool = True) -> None:
        cx = np.asarray(cx, dtype=np.float64)
        cy = np.asarray(cy, dtype=np.float64)
        r = np.broadcast_to(np.asarray(r, dtype=np.float64), cx.shape)
        if wrap:
            cx, cy, r = _with_translates(cx, cy, r)
        R = self.res
        span = np.floor(2 * r * R).astype(np.int64) + 2
        # group discs by window size so each batch is a dense array
        for s in np.unique(span):
            sel = span == s
            self._add_batch(cx[sel], cy[sel], r[sel], int(s))

    def _add_batch(self, cx, cy, r, s):
        R = self.res
        per = s * s
        chunk = max(1, 4_000_000 // per)
        off = np.arange(s, dtype=np.int64)
        for k in range(0, cx.size, chunk):
            x, y, rr = cx[k : k + chunk], cy[k : k + chunk], r[k : k + chunk]
            i0 = np.floor((x - rr) * R).astype(np.int64)
            j0 = np.floor((y - rr) * R).astype(np.int64)
            I = (i0[:, None, None] + off[None, :, None]).repeat(s, axis=2)
            J = (j0[:, None, None] + off[None, None, :]).repeat(s, axis=1)
            X = x[:, None, None]
            Y = y[:, None, None]
            r2 = (rr * rr)[:, None, None]
            ok = (I >= 0) & (I < R) & (J >= 0) & (J < R)
            x0, x1 = I / R, (I + 1) / R
            y0, y1 = J / R, (J + 1) / R
            dx = np.maximum(np.maximum(x0 - X, X - x1), 0.0)
            dy = np.maximum(np.maximum(y0 - Y, Y - y1), 0.0)
            near = dx * dx + dy * dy
            fx = np.maximum(np.abs(X - x0), np.abs(X - x1))
            fy = np.maximum(np.abs(Y - y0), np.abs(Y - y1))
            far = fx * fx + fy * fy
            cxx = (I + 0.5) / R - X
            cyy = (J + 0.5) / R - Y
            mid = cxx * cxx + cyy * cyy
            flat = I * R + J
            self.outer[flat[ok & (near < r2 * (1 + _REL) + 1e-300)]] = True
            self.inner[flat[ok & (far < r2 * (1 - _REL))]] = True
            self.centre[flat[ok & (mid < r2)]] = True

    def bounds(self) -> MeasureBounds:
        tot = self.res * self.res
        return MeasureBounds(
            Fraction(int(self.inner.sum()), tot),
            Fraction(int(self.outer.sum()), tot),
            Fraction(int((self.centre | self.inner).sum()), tot),
            self.res,
        )


def _with_translates(cx, cy, r):
    xs, ys, rs = [cx], [cy], [r]
    for sx in (-1, 0, 1):
        for sy in (-1, 0, 1):
            if sx == 0 and sy == 0:
                continue
            m = np.ones(cx.shape, dtype=bool)
            if sx == 1:
                m &= cx < r
            elif sx == -1:
                m &= cx > 1 - r
            if sy == 1:
                m &= cy < r
            elif sy == -1:
                m &= cy > 1 - r
            if m.any():
                xs.append(cx[m] + sx)
                ys.append(cy[m] + sy)
                rs.append(r[m])
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(rs)


def neighborhood_measure(q, eps, resolution: int = 512) -> MeasureBounds:
    """Area of B(q, eps): discs of radius eps about the points of R(q), clipped to I^2."""
    q = GaussianInt.of(q)
    if q.is_zero():
        raise DomainError("q must be nonzero")
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    rs = resonant_set(q)
    x, y = rs.as_floats()
    r = float(eps)
    ras = DiscRaster(resolution)
    ras.add(x, y, np.full(x.shape, r))
    return ras.bounds()


def capped_bounds(b: MeasureBounds, area_sum: float) -> MeasureBounds:
    """Tighten the outer bound by pi * sum r^2 where that beats the grid.

    Discs much smaller than a cell each blacken a whole cell, so for sparse
    unions the plain area sum is the better upper bound.
    """
    cap = Fraction(area_sum * (1 + 1e-9)) * Fraction(355, 113)  # 355/113 > pi
    cap = Fraction(math.ceil(cap * 2**40), 2**40)
    if cap >= b.outer:
        return b
    outer = max(cap, b.inner)
    return MeasureBounds(b.inner, outer, min(max(b.estimate, b.inner), outer), b.resolution)


def _union_of_shells(pairs: np.ndarray, radius_of_norm, resolution: int) -> MeasureBounds:
    ras = DiscRaster(resolution)
    if pairs.size == 0:
        return ras.bounds()
    buf_x, buf_y, buf_r, size = [], [], [], 0
    area = 0.0
    for q1, q2 in pairs.tolist():
        xs, ys, n = _residues(q1, q2)
        r = radius_of_norm(n)
        buf_x.append(xs / n)
        buf_y.append(ys / n)
        buf_r.append(np.full(xs.shape, r))
        area += xs.size * r * r
        size += xs.size
        if size >= 2_000_000:
            ras.add(np.concatenate(buf_x), np.concatenate(buf_y), np.concatenate(buf_r))
            buf_x, buf_y, buf_r, size = [], [], [], 0
    if buf_x:
        ras.add(np.concatenate(buf_x), np.concatenate(buf_y), np.concatenate(buf_r))
    return capped_bounds(ras.bounds(), area)


def small_denominator_measure(N: int, resolution: int = 512) -> MeasureBounds:
    """Area of S(N): discs B(p/q, 2/(|q| N)) over 1 <= |q| < N / log N."""
    if N < 2:
        raise DomainError("N must be >= 2")
    M = N / math.log(N)
    # |q| < M  <=>  |q|^2 < M^2; M^2 is irrational, so no integer norm sits on it
    pairs = normalized_denominators(1, M * M)
    return _union_of_shells(pairs, lambda n: 2.0 / (math.sqrt(n) * N), resolution)


# ---------------------------------------------------------------- ubiquity coverage


@dataclass
class CoverageReport:
    N: int
    resolution: int
    rho_scale: float
    samples: int
    covered: int
    covered_fraction: Fraction
    by_stage: dict = field(default_factory=dict)
    uncovered: list = field(default_factory=list)

    def as_record(self) -> dict:
        return {
            "N": self.N,
            "resolution": self.resolution,
            "rho_scale": self.rho_scale,
            "samples": self.samples,
            "covered": self.covered,
            "covered_fraction": f"{self.covered_fraction.numerator}/{self.covered_fraction.denominator}",
            "by_stage": self.by_stage,
        }


def _as_ints(c: np.ndarray, hi: float):
    # candidates beyond the annulus are replaced by 0, which never verifies
    good = np.isfinite(c) & (np.abs(c) <= 2 * hi + 2)
    c = np.where(good, c, 0)
    return np.rint(c.real).astype(np.int64), np.rint(c.imag).astype(np.int64)


def _round_c(w):
    return np.floor(w.real + 0.5) + 1j * np.floor(w.imag + 0.5)


class _Verifier:
    """Integer check that q is a covering witness for cell centre (i, j)."""

    def __init__(self, N: int, res: int, rho_scale: float):
        self.N, self.res = N, res
        L = math.log(N)
        self.lo2 = (N / L) ** 2 * (1 + 1e-12)
        self.hi2 = N * N
        rho = rho_scale * 2 * L / (N * N)
        S = 2 * res
        self.S = S
        self.coef = S * S * rho * rho * (1 - 1e-12)

    def __call__(self, i, j, q1, q2):
        S = self.S
        nq = q1 * q1 + q2 * q2
        u = 2 * i + 1
        v = 2 * j + 1
        U = q1 * u - q2 * v
        V = q2 * u + q1 * v
        p1 = np.floor_divide(2 * U + S, 2 * S)
        p2 = np.floor_divide(2 * V + S, 2 * S)
        r1 = U - p1 * S
        r2 = V - p2 * S
        res2 = r1 * r1 + r2 * r2  # |q z - p|^2 S^2
        band = (nq > self.lo2) & (nq <= self.hi2)
        return band & (res2.astype(np.float64) < self.coef * nq.astype(np.float64))


def _cf_candidates(z: np.ndarray, hi: float, depth: int = 60):
    """Yield (q_k, q_{k-1}) of the nearest-integer complex continued fraction."""
    x = z.copy()
    q0 = np.zeros_like(z)
    q1 = np.ones_like(z)
    a = _round_c(x)
    x = x - a
    for _ in range(depth):
        yield q1, q0
        nz = np.abs(x) > 1e-15
        y = np.where(nz, 1 / np.where(nz, x, 1), 0)
        a = _round_c(y)
        x = np.where(nz, y - a, 0)
        q0, q1 = q1, np.where(nz, a * q1 + q0, q1)
        if np.all(np.abs(q0) > 2 * hi):
            break


def ubiquity_coverage(
    N: int,
    resolution: int = 2048,
    rho_scale: float = 1.0,
    brute_budget: float = 3e8,
    keep_uncovered: int = 0,
) -> CoverageReport:
    """Fraction of cell centres z of I with a witness q, p such that

    N / log N < |q| <= N and |z - p/q| < rho(N) / |q|, rho(N) = 2 N^-2 log N.

    Each counted centre has an explicit witness q verified in integers, so the
    fraction is a certified lower bound for the sampled coverage. Witnesses are
    searched among continued fraction denominators, then small combinations
    A q_k + B q_{k-1}, then by brute force when the budget allows.
    """
    if N < 3:
        raise DomainError("N must be >= 3")
    R = resolution
    vf = _Verifier(N, R, rho_scale)
    hi = float(N)
    total_cov = 0
    stage_counts = {"cf": 0, "combos": 0, "brute": 0}
    leftovers_i, leftovers_j = [], []
    rows = max(1, 262_144 // R)
    for r0 in range(0, R, rows):
        I, J = np.meshgrid(np.arange(r0, min(R, r0 + rows), dtype=np.int64), np.arange(R, dtype=np.int64), indexing="ij")
        I, J = I.ravel(), J.ravel()
        z = (I + 0.5) / R + 1j * (J + 0.5) / R
        found = np.zeros(z.shape, dtype=bool)
        for qk, qkm in _cf_candidates(z, hi):
            for cand in (qk, qk + qkm, qk - qkm, qk + 1j * qkm, qk - 1j * qkm):
                todo = ~found
                if not todo.any():
                    break
                c = cand[todo]
                ok = vf(I[todo], J[todo], *_as_ints(c, hi))
                idx = np.nonzero(todo)[0][ok]
                found[idx] = True
        stage_counts["cf"] += int(found.sum())
        # second stage on what is left
        rest = np.nonzero(~found)[0]
        if rest.size:
            f2 = np.zeros(rest.size, dtype=bool)
            Ir, Jr = I[rest], J[rest]
            box = [a + 1j * b for a in range(-2, 3) for b in range(-2, 3)]
            for qk, qkm in _cf_candidates(z[rest], hi):
                for A in box:
                    for B in box:
                        if A == 0 and B == 0:
                            continue
                        todo = ~f2
                        if not todo.any():
                            break
                        c = A * qk[todo] + B * qkm[todo]
                        ok = vf(Ir[todo], Jr[todo], *_as_ints(c, hi))
                        f2[np.nonzero(todo)[0][ok]] = True
            stage_counts["combos"] += int(f2.sum())
            found[rest[f2]] = True
        total_cov += int(found.sum())
        miss = np.nonzero(~found)[0]
        leftovers_i.append(I[miss])
        leftovers_j.append(J[miss])
    Il = np.concatenate(leftovers_i)
    Jl = np.concatenate(leftovers_j)
    if Il.size:
        L = math.log(N)
        qs = _annulus(N / L, N)
        if Il.size * len(qs) <= brute_budget:
            hit = _brute(vf, Il, Jl, qs)
            stage_counts["brute"] = int(hit.sum())
            total_cov += int(hit.sum())
            Il, Jl = Il[~hit], Jl[~hit]
    samples = R * R
    unc = [((int(i) + 0.5) / R, (int(j) + 0.5) / R) for i, j in zip(Il[:keep_uncovered], Jl[:keep_uncovered])]
    return CoverageReport(N, R, rho_scale, samples, total_cov, Fraction(total_cov, samples), stage_counts, unc)


def _annulus(lo: float, hi: float) -> np.ndarray:
    K = int(hi) + 1
    a = np.arange(-K, K + 1, dtype=np.int64)
    A, B = np.meshgrid(a, a, indexing="ij")
    A, B = A.ravel(), B.ravel()
    n = A * A + B * B
    keep = (n > lo * lo) & (n <= hi * hi)
    return np.stack([A[keep], B[keep]], axis=1)


def _brute(vf: _Verifier, I: np.ndarray, J: np.ndarray, qs: np.ndarray) -> np.ndarray:
    hit = np.zeros(I.size, dtype=bool)
    step = max(1, 2_000_000 // max(1, len(qs)))
    q1 = qs[None, :, 0]
    q2 = qs[None, :, 1]
    for k in range(0, I.size, step):
        ii = I[k : k + step, None]
        jj = J[k : k + step, None]
        hit[k : k + step] = vf(ii, jj, q1, q2).any(axis=1)
    return hit


def iter_points(q) -> Iterator[CPoint]:
    yield from resonant_set(q).points()
