"""Piecewise recurrences E(q) = a(q) + r(q) E(f(q)) on [0, 1].

A :class:`PiecewiseRecurrence` is a finite list of :class:`Piece` objects whose
intervals partition the unit interval. On each piece the map ``f`` is affine
and the weight ``r`` and additive term ``a`` are constants. The five built-in
families model the halting probability (``H0``) and the expected number of
biased flips (``E0``..``E3``) of the coin-simulation procedures.
"""

from __future__ import annotations

import enum
import functools
import math
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, NamedTuple, Optional

from .errors import (InvalidBias, InvalidBreakpoint, InvalidRecurrence,
                     OutOfDomain, PieceExplosion)
from .intervals import ONE, ZERO, Interval, affine_compose, to_rational

DEFAULT_PIECE_LIMIT = 100_000


def piece_limit() -> int:
    """Refined-piece budget; ``QFLIP_PIECE_LIMIT`` overrides the default."""
    env = os.environ.get("QFLIP_PIECE_LIMIT")
    return int(env) if env else DEFAULT_PIECE_LIMIT


class Family(str, enum.Enum):
    H0 = "H0"
    E0 = "E0"
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool
    f_slope: Fraction
    f_intercept: Fraction
    r: Fraction
    a: Fraction
    tag: str = ""

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi, self.lo_closed, self.hi_closed)

    def contains(self, q: Fraction) -> bool:
        return q in self.interval

    def f(self, q: Fraction) -> Fraction:
        return self.f_slope * q + self.f_intercept

    @classmethod
    def on(cls, iv: Interval, f_slope, f_intercept, r, a, tag="") -> "Piece":
        return cls(iv.lo, iv.hi, iv.lo_closed, iv.hi_closed,
                   to_rational(f_slope), to_rational(f_intercept),
                   to_rational(r), to_rational(a), tag)


@dataclass(frozen=True)
class PiecewiseRecurrence:
    pieces: tuple
    p: Fraction
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @property
    def c_max(self) -> Fraction:
        return max(pc.r for pc in self.pieces)

    @property
    def c_min(self) -> Fraction:
        return min(pc.r for pc in self.pieces)

    @property
    def sup_a(self) -> Fraction:
        return max(pc.a for pc in self.pieces)

    @property
    def inf_a(self) -> Fraction:
        return min(pc.a for pc in self.pieces)

    def breakpoints(self) -> list:
        """Interior piece boundaries, sorted."""
        pts = {pc.lo for pc in self.pieces} | {pc.hi for pc in self.pieces}
        return sorted(x for x in pts if ZERO < x < ONE)

    def piece_at(self, q: Fraction) -> tuple:
        for i, pc in enumerate(self.pieces):
            if pc.contains(q):
                return i, pc
        raise OutOfDomain(f"no piece of {self.label or 'recurrence'} contains q={q}")


class MapValue(NamedTuple):
    f_q: Fraction
    r_q: Fraction
    a_q: Fraction
    piece_index: int


class CompiledMap:
    """Integer-coefficient form of a recurrence for fast exact stepping.

    A point q = n/d is carried as a pair of ints; each piece becomes its
    bounds and map scaled to integers, so locating and stepping never build
    a Fraction. ``r`` and ``a`` are kept as (numerator, denominator) pairs.
    """

    def __init__(self, rec: "PiecewiseRecurrence"):
        self.rec = rec
        self.branches = []
        for pc in rec.pieces:
            den = math.lcm(pc.f_slope.denominator, pc.f_intercept.denominator)
            self.branches.append((
                pc.lo.numerator, pc.lo.denominator, pc.lo_closed,
                pc.hi.numerator, pc.hi.denominator, pc.hi_closed,
                pc.f_slope.numerator * (den // pc.f_slope.denominator),
                pc.f_intercept.numerator * (den // pc.f_intercept.denominator),
                den,
            ))

    def locate(self, n: int, d: int) -> int:
        for i, (ln, ld, lc, hn, hd, hc, *_rest) in enumerate(self.branches):
            lo_cmp = n * ld - ln * d
            if lo_cmp < 0 or (lo_cmp == 0 and not lc):
                continue
            hi_cmp = n * hd - hn * d
            if hi_cmp > 0 or (hi_cmp == 0 and not hc):
                continue
            return i
        raise OutOfDomain(f"no piece of {self.rec.label or 'recurrence'} contains q={n}/{d}")

    def step(self, n: int, d: int, i: int) -> tuple:
        """Image of n/d under piece i, in lowest terms."""
        s, t, den = self.branches[i][6:9]
        n, d = s * n + t * d, den * d
        g = math.gcd(n, d)
        return n // g, d // g


@functools.lru_cache(maxsize=256)
def compile_map(rec: "PiecewiseRecurrence") -> CompiledMap:
    return CompiledMap(rec)


# --------------------------------------------------------------------------
# built-in families
# --------------------------------------------------------------------------

def _check_bias(p: Fraction) -> None:
    if not (ZERO < p <= Fraction(1, 2)):
        raise InvalidBias(f"bias p must satisfy 0 < p <= 1/2, got {p}")


def e3_breakpoint_range(p) -> tuple:
    """Admissible (lo, hi) for the E3 breakpoint c."""
    p = to_rational(p)
    s = (1 - p) ** 2
    return max(s, 1 - s), 1 - p


def _outer_pieces(p: Fraction, a=ONE):
    # p = 1/2 makes "q <= p" and "q >= 1-p" overlap at 1/2; the procedure tests
    # q >= 1-p first, so the low piece gives up the shared point.
    low = Interval(ZERO, p, True, p < Fraction(1, 2))
    high = Interval(1 - p, ONE, True, True)
    return (Piece.on(low, 1 / p, 0, p, a, "low"),
            Piece.on(high, 1 / p, -(1 - p) / p, p, a, "high"))


def _breakpoint_family(p: Fraction, c: Fraction, label: str) -> PiecewiseRecurrence:
    low, high = _outer_pieces(p)
    mid_left = Piece.on(Interval(p, c, False, c < 1 - p), 1 / (1 - p), -p / (1 - p),
                        1 - p, 1, "mid")
    mid_right = Piece.on(Interval(c, 1 - p, False, False), 1 / (1 - p), 0,
                         1 - p, 1, "mid_right")
    pieces = [pc for pc in (low, mid_left, mid_right, high) if not pc.interval.is_empty]
    return PiecewiseRecurrence(pieces, p, label)


def make_builtin(family, p, c=None) -> PiecewiseRecurrence:
    """Construct one of the built-in recurrences for bias ``p``.

    ``c`` only matters for E3, where it defaults to
    ``max((1-p)**2, 1-(1-p)**2)``. E2 always breaks at 1/2.
    """
    family = Family(family)
    p = to_rational(p)
    _check_bias(p)
    half = Fraction(1, 2)

    if family in (Family.H0, Family.E0):
        is_h = family is Family.H0
        low = Piece.on(Interval(ZERO, p, True, True), 1 / p, 0, p,
                       0 if is_h else 1, "low")
        rest = Piece.on(Interval(p, ONE, False, True), 1 / (1 - p), -p / (1 - p),
                        1 - p, p if is_h else 1, "rest")
        rec = PiecewiseRecurrence((low, rest), p, f"{family.value}@p={p}")
    elif family is Family.E1:
        low, high = _outer_pieces(p)
        mid = Piece.on(Interval(p, 1 - p, False, False), 1 / (1 - p), -p / (1 - p),
                       1 - p, 1, "mid")
        pieces = [pc for pc in (low, mid, high) if not pc.interval.is_empty]
        rec = PiecewiseRecurrence(pieces, p, f"E1@p={p}")
    elif family is Family.E2:
        rec = _breakpoint_family(p, half, f"E2@p={p}")
    else:
        lo, hi = e3_breakpoint_range(p)
        if lo > hi:
            raise InvalidBreakpoint(
                f"no admissible breakpoint for p={p}: need p <= (1-p)^2")
        c = lo if c is None else to_rational(c)
        if not (lo <= c <= hi):
            raise InvalidBreakpoint(f"breakpoint c={c} outside [{lo}, {hi}]")
        rec = _breakpoint_family(p, c, f"E3@p={p},c={c}")

    ensure_valid(rec)
    return rec


# --------------------------------------------------------------------------
# evaluation and validation
# --------------------------------------------------------------------------

def eval_map(rec: PiecewiseRecurrence, q) -> MapValue:
    q = to_rational(q)
    if not (ZERO <= q <= ONE):
        raise OutOfDomain(f"q={q} is outside [0, 1]")
    i, pc = rec.piece_at(q)
    return MapValue(pc.f(q), pc.r, pc.a, i)


def validate(rec: PiecewiseRecurrence) -> list:
    """Return a list of human-readable violations (empty when valid)."""
    out = []
    if not rec.pieces:
        return ["recurrence has no pieces"]
    for i, pc in enumerate(rec.pieces):
        if not (ZERO <= pc.lo <= pc.hi <= ONE):
            out.append(f"piece {i}: bounds {pc.lo}, {pc.hi} not within [0, 1]")
        if not (ZERO < pc.r < ONE):
            out.append(f"piece {i}: weight r={pc.r} not in (0, 1)")
        if pc.a < 0:
            out.append(f"piece {i}: additive term a={pc.a} is negative")
        iv = pc.interval
        if iv.is_empty:
            out.append(f"piece {i}: empty interval {iv}")
            continue
        img = iv.image(pc.f_slope, pc.f_intercept)
        if img.lo < 0 or img.hi > 1:
            out.append(f"piece {i}: image {img} of {iv} escapes [0, 1]")

    ivs = sorted((pc.interval for pc in rec.pieces if not pc.interval.is_empty),
                 key=Interval.sort_key)
    if not ivs:
        return out
    first, last = ivs[0], ivs[-1]
    if first.lo > 0 or not first.lo_closed:
        out.append(f"gap at q=0: first piece is {first}")
    for left, right in zip(ivs, ivs[1:]):
        if left.hi > right.lo or (left.hi == right.lo and left.hi_closed and right.lo_closed):
            out.append(f"overlap at q={right.lo}: {left} and {right}")
        elif left.hi < right.lo or not (left.hi_closed or right.lo_closed):
            out.append(f"gap between {left} and {right}")
    if last.hi < 1 or not last.hi_closed:
        out.append(f"gap at q=1: last piece is {last}")
    return out


def ensure_valid(rec: PiecewiseRecurrence) -> PiecewiseRecurrence:
    problems = validate(rec)
    if problems:
        raise InvalidRecurrence(problems)
    return rec


# --------------------------------------------------------------------------
# the operator tau and its powers
# --------------------------------------------------------------------------

def tau_apply(rec: PiecewiseRecurrence, g: Callable, q) -> Fraction:
    """One unwinding of the recurrence applied to the function ``g`` at ``q``."""
    f_q, r_q, a_q, _ = eval_map(rec, q)
    return a_q + r_q * g(f_q)


def tau_power(rec: PiecewiseRecurrence, g: Callable, q, n: int):
    """``tau^n(g)(q)`` by n nested applications (no refinement)."""
    if n == 0:
        return g(to_rational(q))
    return tau_apply(rec, lambda y: tau_power(rec, g, y, n - 1), q)


def unwind(rec: PiecewiseRecurrence, n: int,
           limit: Optional[int] = None) -> PiecewiseRecurrence:
    """Recurrence for tau^n: map f^n, weight prod r(f^i q), additive partial sum."""
    if n < 1:
        raise ValueError("unwind needs n >= 1")
    limit = piece_limit() if limit is None else limit
    cur = list(rec.pieces)
    for _ in range(n - 1):
        nxt = []
        for cp in cur:
            for pc in rec.pieces:
                iv = pc.interval.preimage(cp.f_slope, cp.f_intercept, cp.interval)
                if iv.is_empty:
                    continue
                slope, icpt = affine_compose(pc.f_slope, pc.f_intercept,
                                             cp.f_slope, cp.f_intercept)
                nxt.append(Piece.on(iv, slope, icpt, cp.r * pc.r, cp.a + cp.r * pc.a,
                                    f"{cp.tag}.{pc.tag}" if cp.tag else pc.tag))
                if len(nxt) > limit:
                    raise PieceExplosion(
                        f"unwinding {rec.label} {n} times exceeds {limit} pieces")
        cur = nxt
    cur.sort(key=lambda pc: pc.interval.sort_key())
    return PiecewiseRecurrence(cur, rec.p, f"{rec.label}^{n}")


def with_pieces(rec: PiecewiseRecurrence, **changes) -> PiecewiseRecurrence:
    """Copy of ``rec`` with the given Piece fields overridden on every piece."""
    return PiecewiseRecurrence([replace(pc, **changes) for pc in rec.pieces],
                               rec.p, rec.label)


def e0_star(p) -> Callable:
    """Closed-form expected flip count of the first procedure."""
    p = to_rational(p)
    return lambda q: q / p + (1 - q) / (1 - p)
