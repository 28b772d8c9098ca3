"""The complex (alpha, beta) Schmidt game and Alice's winning strategy.

Bob opens with a closed disc B1 = B(b1, rho1). Alice answers each B_j with
A_j of radius alpha * rad(B_j) inside it, Bob answers with B_{j+1} of radius
beta * rad(A_j) inside A_j. Alice targets the badly approximable set: the
final disc must keep away from every p/q with |q| below the played scale,

    |z - p/q| > delta / |q|^2   for all z in B_{nt+1} and 0 < |q| < R^n.

Rounds have t moves each. In round k Alice looks at the fractions with
R^{k-1} <= |q| < R^k whose delta-disc meets the round's starting disc; at most
one such fraction exists. Far from the centre she dodges it in one move,
near the centre she escapes along a fixed direction for t moves.

All centres and radii are exact rationals. Numpy is used only to shortlist
candidate denominators; every decision is re-checked exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .arith import (
    CPoint,
    DomainError,
    GaussianInt,
    GaussianRational,
    InvariantViolation,
    nearest_gaussian,
    reduce,
)
from .resonant import normalized_denominators

__all__ = [
    "Disc",
    "GameParams",
    "derive_constants",
    "GameTrace",
    "RoundRecord",
    "EscapeEpisode",
    "find_problematic_fraction",
    "strategy_a_move",
    "play_game",
    "certify_trace",
    "Certificate",
    "ShellReport",
    "dimension_lower_bound",
    "CenteringAdversary",
    "RandomAdversary",
    "TargetAdversary",
    "InteractiveAdversary",
    "IllegalMove",
    "GameAborted",
    "rational_unit",
]


class IllegalMove(DomainError):
    pass


class GameAborted(Exception):
    pass


@dataclass(frozen=True)
class Disc:
    center: CPoint
    radius: Fraction

    def contains(self, other: "Disc") -> bool:
        """Closed-disc containment, exact."""
        gap = self.radius - other.radius
        if gap < 0:
            return False
        return (self.center - other.center).norm2() <= gap * gap

    def as_record(self) -> dict:
        c = self.center
        return {"center": [_fs(c.re), _fs(c.im)], "radius": _fs(self.radius)}


def _fs(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class GameParams:
    alpha: Fraction
    beta: Fraction
    rho1: Fraction
    gamma: Fraction
    delta: Fraction
    t: int
    R2: Fraction  # R^2 = (alpha beta)^(-t)

    def radius_B(self, j: int) -> Fraction:
        return self.rho1 * (self.alpha * self.beta) ** (j - 1)

    def shell(self, k: int) -> tuple[Fraction, Fraction]:
        """Norm range [R^(2k-2), R^(2k)) of round k."""
        return self.R2 ** (k - 1), self.R2**k

    def as_record(self) -> dict:
        return {
            "alpha": _fs(self.alpha),
            "beta": _fs(self.beta),
            "rho1": _fs(self.rho1),
            "gamma": _fs(self.gamma),
            "delta": _fs(self.delta),
            "t": self.t,
            "R2": _fs(self.R2),
        }


def derive_constants(alpha, beta, rho1=None) -> GameParams:
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not (0 < alpha <= Fraction(1, 2)):
        raise DomainError("need 0 < alpha <= 1/2")
    if not (0 < beta < 1):
        raise DomainError("need 0 < beta < 1")
    ab = alpha * beta
    gamma = 1 + ab - 2 * alpha
    if gamma <= 0:
        raise DomainError("gamma = 1 + alpha beta - 2 alpha must be positive")
    cap = ab * gamma / 8
    rho1 = cap if rho1 is None else Fraction(rho1)
    if not (0 < rho1 <= cap):
        raise DomainError(f"rho1 must lie in (0, alpha beta gamma / 8] = (0, {cap}]")
    t = 1
    while not (ab * gamma <= 2 * ab**t < gamma):
        t += 1
        if t > 10_000:
            raise InvariantViolation("no admissible t")
    delta = gamma / 4 * min(rho1, ab * ab * gamma / 8)
    return GameParams(alpha, beta, rho1, gamma, delta, t, ab ** (-t))


# ---------------------------------------------------------------- records


@dataclass
class RoundRecord:
    k: int
    start: int  # index j of B_j where the round starts
    problematic: Optional[GaussianRational]
    q_norm: Optional[int]
    case: str  # "clear", "dodge" or "escape"
    direction: Optional[CPoint] = None


@dataclass
class EscapeEpisode:
    start: int
    end: int
    displacement2: Fraction
    required2: Fraction
    verified: bool


@dataclass
class GameTrace:
    params: GameParams
    discs: list[Disc] = field(default_factory=list)  # B1, A1, B2, A2, ...
    rounds: list[RoundRecord] = field(default_factory=list)
    escapes: list[EscapeEpisode] = field(default_factory=list)
    aborted: bool = False
    notes: list[str] = field(default_factory=list)

    def B(self, j: int) -> Disc:
        return self.discs[2 * (j - 1)]

    def A(self, j: int) -> Disc:
        return self.discs[2 * j - 1]

    @property
    def last_B_index(self) -> int:
        return (len(self.discs) + 1) // 2

    @property
    def completed_rounds(self) -> int:
        return (self.last_B_index - 1) // self.params.t

    @property
    def omega_box(self) -> Disc:
        """The last disc Bob played."""
        if not self.discs:
            raise DomainError("empty trace")
        return self.B(self.last_B_index)


# ---------------------------------------------------------------- geometry helpers


def rational_unit(dx: float, dy: float, denom: int) -> CPoint:
    """A unit vector with rational coordinates close to the direction (dx, dy).

    Uses ((1 - m^2), 2m) / (1 + m^2) with m a rational approximation of
    tan(theta / 2); the result has norm exactly 1.
    """
    if dx == 0 and dy == 0:
        return CPoint(1, 0)
    flip = dx < 0
    if flip:
        dx, dy = -dx, -dy
    theta = math.atan2(dy, dx)  # in (-pi/2, pi/2]
    m = Fraction(math.tan(theta / 2)).limit_denominator(denom)
    d = 1 + m * m
    u = CPoint((1 - m * m) / d, 2 * m / d)
    return -u if flip else u


def _shell_pairs(params: GameParams, k: int) -> np.ndarray:
    lo, hi = params.shell(k)
    return normalized_denominators(math.ceil(lo), math.ceil(hi))


_PAIRS: dict = {}


def _cached_pairs(params: GameParams, k: int) -> np.ndarray:
    key = (params.R2, k)
    if key not in _PAIRS:
        _PAIRS[key] = _shell_pairs(params, k)
    return _PAIRS[key]


def find_problematic_fraction(B: Disc, k: int, params: GameParams):
    """The unique p/q (if any) with q in shell k whose delta-disc meets B.

    Returns (reduced fraction, smallest norm of q among its representatives
    in the shell) or None. Two distinct such fractions would contradict the
    separation argument and raise InvariantViolation.
    """
    if k < 1:
        return None
    pairs = _cached_pairs(params, k)
    if pairs.size == 0:
        return None
    b = B.center
    rho, delta = B.radius, params.delta
    q1 = pairs[:, 0].astype(np.float64)
    q2 = pairs[:, 1].astype(np.float64)
    bx, by = float(b.re), float(b.im)
    wr = q1 * bx - q2 * by
    wi = q2 * bx + q1 * by
    nq = q1 * q1 + q2 * q2
    aq = np.sqrt(nq)
    dist = np.hypot(wr - np.floor(wr + 0.5), wi - np.floor(wi + 0.5))
    thr = aq * float(rho) + float(delta) / aq
    if thr.max() >= 0.5:
        raise InvariantViolation("problematic search radius too large for nearest-p shortcut")
    cand = np.nonzero(dist <= thr + 1e-8)[0]
    found: dict = {}
    for i in cand.tolist():
        q = GaussianInt(int(pairs[i, 0]), int(pairs[i, 1]))
        w = CPoint.of(q) * b
        p = nearest_gaussian(w)
        n = q.norm()
        reach = rho + delta / n
        if (w - p).norm2() <= reach * reach * n:  # |b - p/q| <= rho + delta/|q|^2
            fr = reduce(p, q)
            if fr not in found or n < found[fr]:
                found[fr] = n
    if not found:
        return None
    if len(found) > 1:
        raise InvariantViolation(f"more than one problematic fraction in shell {k}: {list(found)}")
    (fr, n), = found.items()
    return fr, n


def _dodge(B: Disc, target: CPoint, q_norm: int, params: GameParams) -> Optional[Disc]:
    """A child of B of radius alpha rad(B) missing the closed disc B(target, delta/|q|^2)."""
    v = B.center - target
    rad = params.alpha * B.radius
    clear = rad + params.delta / q_norm
    step = (1 - params.alpha) * B.radius
    for denom in (10, 10**3, 10**6, 10**9, 10**12):
        u = rational_unit(float(v.re), float(v.im), denom)
        a = B.center + u.scale(step)
        if (a - target).norm2() > clear * clear:
            return Disc(a, rad)
    return None


# ---------------------------------------------------------------- strategy


ESCAPE_DIRECTION = CPoint(1, 0)


def strategy_a_move(trace: GameTrace) -> Disc:
    """Alice's reply to the last B of the trace. Plans a round at its first move."""
    P = trace.params
    j = trace.last_B_index
    if len(trace.discs) != 2 * j - 1:
        raise DomainError("it is not Alice's turn")
    B = trace.B(j)
    k = (j - 1) // P.t + 1
    m = (j - 1) % P.t
    if m == 0:
        hit = find_problematic_fraction(B, k, P)
        if hit is None:
            trace.rounds.append(RoundRecord(k, j, None, None, "clear"))
        else:
            fr, n = hit
            x = fr.to_cpoint()
            dz = (x - B.center).norm2()
            lim = P.delta / P.R2 ** (k - 1)
            case = "dodge" if dz > lim * lim else "escape"
            rec = RoundRecord(k, j, fr, n, case)
            if case == "escape":
                rec.direction = ESCAPE_DIRECTION
            trace.rounds.append(rec)
    rec = trace.rounds[-1]
    rad = P.alpha * B.radius
    if rec.case == "escape":
        return Disc(B.center + rec.direction.scale((1 - P.alpha) * B.radius), rad)
    if rec.case == "dodge" and m == 0:
        A = _dodge(B, rec.problematic.to_cpoint(), rec.q_norm, P)
        if A is not None:
            return A
        # rational direction search failed: fall back to escaping
        trace.notes.append(f"round {k}: dodge fell back to escape")
        rec.case, rec.direction = "escape", ESCAPE_DIRECTION
        return Disc(B.center + rec.direction.scale((1 - P.alpha) * B.radius), rad)
    return Disc(B.center, rad)


# ---------------------------------------------------------------- adversaries


class CenteringAdversary:
    """Bob always recentres: B_{j+1} shares the centre of A_j."""

    interactive = False

    def __init__(self, start: CPoint = CPoint(0, 0)):
        self.start = CPoint.of(start)

    def first(self, params: GameParams) -> CPoint:
        return self.start

    def respond(self, trace: GameTrace, A: Disc) -> CPoint:
        return A.center


class RandomAdversary:
    """Seeded Bob playing rational points strictly inside the legal region."""

    interactive = False

    def __init__(
        self, seed: int = 0, start: Optional[CPoint] = None, grain: int = 1000, resonant_start: bool = False
    ):
        self.rng = random.Random(seed)
        self.grain = grain
        self.start = start
        self.resonant_start = resonant_start

    def first(self, params: GameParams) -> CPoint:
        if self.start is not None:
            return CPoint.of(self.start)
        if self.resonant_start:
            # open on p/q with q in the first shell, which forces an escape
            pairs = _cached_pairs(params, 1)
            q1, q2 = pairs[self.rng.randrange(len(pairs))].tolist()
            n = q1 * q1 + q2 * q2
            p = GaussianInt(self.rng.randrange(n), self.rng.randrange(n))
            z = CPoint.of(p) / CPoint.of(GaussianInt(q1, q2))
            return CPoint(z.re - math.floor(z.re), z.im - math.floor(z.im))
        g = self.grain
        return CPoint(Fraction(self.rng.randrange(g), g), Fraction(self.rng.randrange(g), g))

    def respond(self, trace: GameTrace, A: Disc) -> CPoint:
        g = self.grain
        beta = trace.params.beta
        m = Fraction(self.rng.randrange(-g, g + 1), g)
        d = 1 + m * m
        u = CPoint((1 - m * m) / d, 2 * m / d)
        if self.rng.random() < 0.5:
            u = -u
        s = Fraction(self.rng.randrange(g), g)  # < 1, so strictly inside
        return A.center + u.scale(s * (1 - beta) * A.radius)


class TargetAdversary:
    """Bob steers toward a fixed target point, staying strictly inside A."""

    interactive = False

    def __init__(self, target, start: Optional[CPoint] = None, slack: Fraction = Fraction(999, 1000)):
        self.target = CPoint.of(target)
        self.start = self.target if start is None else CPoint.of(start)
        self.slack = slack

    def first(self, params: GameParams) -> CPoint:
        return self.start

    def respond(self, trace: GameTrace, A: Disc) -> CPoint:
        reach = (1 - trace.params.beta) * A.radius * self.slack
        v = self.target - A.center
        if v.norm2() <= reach * reach:
            return self.target
        u = rational_unit(float(v.re), float(v.im), 10**6)
        return A.center + u.scale(reach)


class InteractiveAdversary:
    """Bob is a human typing centres as "x y" with exact fractions; "q" quits."""

    interactive = True

    def __init__(self, read: Callable[[str], str] = input, write: Callable[[str], None] = print):
        self.read = read
        self.write = write

    def _ask(self, prompt: str) -> CPoint:
        while True:
            line = self.read(prompt).strip()
            if line.lower() in ("q", "quit", "exit"):
                raise GameAborted("quit")
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                self.write("enter two exact numbers, e.g. 1/3 -2/7")
                continue
            try:
                return CPoint(Fraction(parts[0]), Fraction(parts[1]))
            except (ValueError, ZeroDivisionError):
                self.write("could not parse, use fractions like 3/7")

    def first(self, params: GameParams) -> CPoint:
        return self._ask(f"B1 centre (radius {params.rho1}): ")

    def respond(self, trace: GameTrace, A: Disc) -> CPoint:
        c = A.center
        lim = (1 - trace.params.beta) * A.radius
        self.write(f"Alice plays A centre ({c.re}, {c.im}) radius {A.radius}")
        return self._ask(f"your centre within {lim} of Alice's centre: ")

    def rejected(self, reason: str) -> None:
        self.write(f"illegal move: {reason}")


# ---------------------------------------------------------------- playing


def _verify_escape(trace: GameTrace, rec: RoundRecord) -> None:
    P = trace.params
    s, e = rec.start, rec.start + P.t
    d2 = (trace.B(e).center - trace.B(s).center).norm2()
    need = trace.B(s).radius * P.gamma
    trace.escapes.append(EscapeEpisode(s, e, d2, need * need, d2 > need * need))


def play_game(params: GameParams, adversary, rounds: int, max_retries: int = 100) -> GameTrace:
    """Play `rounds` rounds, ending on B_{rounds * t + 1}.

    A scripted adversary that moves illegally aborts with IllegalMove; an
    interactive one is told and asked again. Quitting leaves a partial trace
    with ``aborted`` set.
    """
    if rounds < 0:
        raise DomainError("rounds must be >= 0")
    tr = GameTrace(params)
    try:
        tr.discs.append(Disc(adversary.first(params), params.rho1))
        last = rounds * params.t + 1
        while tr.last_B_index < last:
            A = strategy_a_move(tr)
            B = tr.B(tr.last_B_index)
            if not B.contains(A):
                raise InvariantViolation("Alice's disc is not inside Bob's")
            tr.discs.append(A)
            rB = params.beta * A.radius
            for attempt in range(max_retries):
                c = adversary.respond(tr, A)
                Bn = Disc(CPoint.of(c), rB)
                if A.contains(Bn):
                    break
                reason = f"centre must lie within {(1 - params.beta) * A.radius} of {A.center}"
                if getattr(adversary, "interactive", False):
                    adversary.rejected(reason)
                    continue
                raise IllegalMove(reason)
            else:
                raise IllegalMove("too many illegal attempts")
            tr.discs.append(Bn)
            j = tr.last_B_index
            rec = tr.rounds[-1]
            if rec.case == "escape" and j == rec.start + params.t:
                _verify_escape(tr, rec)
    except GameAborted:
        tr.aborted = True
        # drop a dangling A so the trace ends on a B disc
        if len(tr.discs) % 2 == 0:
            tr.discs.pop()
    return tr


# ---------------------------------------------------------------- certificate


@dataclass
class ShellReport:
    k: int
    denominators: int
    min_margin: float  # min of |b - p/q| - r - delta/|q|^2
    K_observed: float  # min of |q|^2 (|b - p/q| - r)
    passed: bool


@dataclass
class Certificate:
    rounds: int
    delta: Fraction
    final: Disc
    shells: list[ShellReport]
    exact_checks: int

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.shells)


def certify_trace(trace: GameTrace, rounds: Optional[int] = None) -> Certificate:
    """Check |z - p/q| > delta/|q|^2 on the final disc for every |q|^2 < R^(2n).

    Only the nearest p to q b needs testing: any other numerator is farther.
    Floats shortlist; every denominator with margin below 1e-8 (in q-scaled
    units) is re-checked in exact arithmetic.
    """
    P = trace.params
    n = trace.completed_rounds if rounds is None else rounds
    fin = trace.B(n * P.t + 1)
    b, r, delta = fin.center, fin.radius, P.delta
    bx, by = float(b.re), float(b.im)
    shells = []
    exact = 0
    for k in range(1, n + 1):
        pairs = _cached_pairs(P, k)
        if pairs.size == 0:
            shells.append(ShellReport(k, 0, math.inf, math.inf, True))
            continue
        q1 = pairs[:, 0].astype(np.float64)
        q2 = pairs[:, 1].astype(np.float64)
        wr = q1 * bx - q2 * by
        wi = q2 * bx + q1 * by
        nq = q1 * q1 + q2 * q2
        aq = np.sqrt(nq)
        dist = np.hypot(wr - np.floor(wr + 0.5), wi - np.floor(wi + 0.5))  # |q b - p|
        slack = dist - aq * float(r) - float(delta) / aq
        ok = slack > 1e-8
        passed = True
        for i in np.nonzero(~ok)[0].tolist():
            exact += 1
            q = GaussianInt(int(pairs[i, 0]), int(pairs[i, 1]))
            w = CPoint.of(q) * b
            p = nearest_gaussian(w)
            nn = q.norm()
            need = r + delta / nn
            if not ((w - p).norm2() > need * need * nn):
                passed = False
        margin = slack / aq
        Kobs = (dist - aq * float(r)) * aq
        shells.append(ShellReport(k, int(pairs.shape[0]), float(margin.min()), float(Kobs.min()), passed))
    return Certificate(n, delta, fin, shells, exact)


# ---------------------------------------------------------------- dimension


C_PACK = Fraction(1, 9)


def dimension_lower_bound(alpha, beta, c_pack: Fraction = C_PACK) -> Fraction:
    """log N(beta) / |log(alpha beta)| with N(beta) = max(1, floor(c_pack / beta^2)).

    N(beta) counts disjoint discs of radius beta*r that fit in a disc of
    radius r; c_pack = 1/9 is a safe packing constant.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise DomainError("need 0 < alpha, beta < 1")
    Nb = max(1, math.floor(c_pack / (beta * beta)))
    s = math.log(Nb) / abs(math.log(alpha * beta))
    return Fraction(s).limit_denominator(10**12)
