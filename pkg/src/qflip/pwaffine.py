"""Piecewise-affine functions on [0, 1] with rational breakpoints.

These are the bound functions the coinduction verifier reasons about. All
comparisons are exact: an affine function on an interval attains its extreme
values at the endpoints (as one-sided limits where the endpoint is open).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import PieceExplosion
from .intervals import (UNIT, ZERO, Cell, CellIndex, Interval, affine_compose,
                        covering_gap, elementary_pieces, sorted_cells, to_rational)
from .process import PiecewiseRecurrence, piece_limit


@dataclass(frozen=True)
class PwAffine:
    """A total piecewise-affine function on the unit interval."""

    cells: tuple

    def __post_init__(self):
        cells = tuple(sorted_cells(self.cells))
        object.__setattr__(self, "cells", cells)
        gap = covering_gap(UNIT, [c.iv for c in cells])
        if gap is not None:
            raise ValueError(f"PwAffine is undefined at q={gap}")
        for c, d in zip(cells, cells[1:]):
            if c.iv.hi > d.iv.lo or (c.iv.hi == d.iv.lo and c.iv.hi_closed and d.iv.lo_closed):
                raise ValueError(f"PwAffine cells overlap: {c.iv} and {d.iv}")

    @classmethod
    def constant(cls, value) -> "PwAffine":
        return cls((Cell(UNIT, ZERO, to_rational(value)),))

    @classmethod
    def affine(cls, slope, intercept) -> "PwAffine":
        return cls((Cell(UNIT, to_rational(slope), to_rational(intercept)),))

    @classmethod
    def identity(cls) -> "PwAffine":
        return cls.affine(1, 0)

    @classmethod
    def from_segments(cls, segments: Iterable) -> "PwAffine":
        """Build from ``(Interval, slope, intercept)`` triples."""
        return cls(tuple(Cell(iv, to_rational(s), to_rational(t)) for iv, s, t in segments))

    @property
    def breakpoints(self) -> list:
        return sorted({c.iv.lo for c in self.cells} | {c.iv.hi for c in self.cells})

    def __call__(self, q) -> Fraction:
        q = to_rational(q)
        for c in self.cells:
            if q in c.iv:
                return c.at(q)
        raise ValueError(f"q={q} outside [0, 1]")

    def restrict(self, guard: Interval) -> list:
        out = []
        for c in self.cells:
            iv = c.iv.intersect(guard)
            if not iv.is_empty:
                out.append(Cell(iv, c.slope, c.intercept))
        return out


class Counterexample(NamedTuple):
    q: Fraction
    lhs: Fraction
    rhs: Fraction


def compose_cells(cells: Sequence[Cell], slope, intercept, domain: Interval) -> list:
    """Cells of ``q -> g(slope*q + intercept)`` for q in ``domain``."""
    out = []
    for c in cells:
        iv = c.iv.preimage(slope, intercept, domain)
        if iv.is_empty:
            continue
        s, t = affine_compose(c.slope, c.intercept, slope, intercept)
        out.append(Cell(iv, s, t))
    return out


def pw_compose(g: PwAffine, rec: PiecewiseRecurrence, limit: Optional[int] = None) -> PwAffine:
    """Exact piecewise-affine form of ``q -> g(f(q))``."""
    limit = piece_limit() if limit is None else limit
    cells = []
    for pc in rec.pieces:
        cells += compose_cells(g.cells, pc.f_slope, pc.f_intercept, pc.interval)
        if len(cells) > limit:
            raise PieceExplosion(f"composition exceeds {limit} pieces")
    return PwAffine(tuple(cells))


def _interior_point(iv: Interval, slope: Fraction, intercept: Fraction,
                    bad_end: Fraction) -> Fraction:
    """A point strictly inside ``iv`` near ``bad_end`` where the affine d < 0.

    Called when d's one-sided limit at the open endpoint ``bad_end`` is
    negative.
    """
    other = iv.hi if bad_end == iv.lo else iv.lo
    if slope * other + intercept < 0:
        return (iv.lo + iv.hi) / 2
    root = -intercept / slope
    return (bad_end + root) / 2


def first_violation(pairs: Iterable) -> Optional[tuple]:
    """First point where ``lhs > rhs`` over ``(interval, lhs_cell, rhs_cell)``.

    Intervals are scanned in the order given; within one interval the left
    endpoint is inspected before the right. Returns ``(q, lhs, rhs)``.
    """
    for iv, lc, rc in pairs:
        ds, dt = rc.slope - lc.slope, rc.intercept - lc.intercept  # d = rhs - lhs
        if iv.is_point:
            q = iv.lo
            if ds * q + dt < 0:
                return q, lc.at(q), rc.at(q)
            continue
        for end, closed in ((iv.lo, iv.lo_closed), (iv.hi, iv.hi_closed)):
            if ds * end + dt < 0:
                q = end if closed else _interior_point(iv, ds, dt, end)
                return q, lc.at(q), rc.at(q)
    return None


def aligned(lhs: Sequence[Cell], rhs: Sequence[Cell], domain: Interval = UNIT) -> list:
    """Common refinement of two cell lists over ``domain``.

    Returns ``(interval, lhs_cell, rhs_cell)`` for every elementary piece of
    ``domain`` covered by both lists, in left-to-right order.
    """
    li, ri = CellIndex(lhs), CellIndex(rhs)
    endpoints = [domain.lo, domain.hi, *li.endpoints(), *ri.endpoints()]
    out = []
    for piece in elementary_pieces(endpoints):
        x = piece.sample_point()
        if x not in domain:
            continue
        lc, rc = li.find(x), ri.find(x)
        if lc is not None and rc is not None:
            out.append((piece, lc, rc))
    return out


def pw_leq(g1: PwAffine, g2: PwAffine, guard: Interval = UNIT):
    """``True`` if g1 <= g2 on ``guard``, else a :class:`Counterexample`."""
    hit = first_violation(aligned(g1.restrict(guard), g2.restrict(guard), guard))
    return True if hit is None else Counterexample(*hit)


def pw_equal(g1: PwAffine, g2: PwAffine, guard: Interval = UNIT) -> bool:
    return pw_leq(g1, g2, guard) is True and pw_leq(g2, g1, guard) is True


def envelope(sources: Sequence[Sequence[Cell]], kind: str) -> list:
    """Pointwise min (``kind='upper'``) or max (``'lower'``) of partial functions.

    Each source is a list of disjoint cells; the envelope is defined wherever
    at least one source is. Crossing points of competing affine pieces become
    new breakpoints so every output cell carries a single affine function.
    """
    if kind not in ("upper", "lower"):
        raise ValueError(kind)
    better = (lambda u, v: u < v) if kind == "upper" else (lambda u, v: u > v)
    indexes = [CellIndex(s) for s in sources if s]
    endpoints = [e for ix in indexes for e in ix.endpoints()]
    out = []
    for piece in elementary_pieces(endpoints):
        x = piece.sample_point()
        cands = [c for c in (ix.find(x) for ix in indexes) if c is not None]
        if not cands:
            continue
        if piece.is_point or len(cands) == 1:
            best = cands[0]
            for c in cands[1:]:
                if better(c.at(x), best.at(x)):
                    best = c
            out.append(Cell(piece, best.slope, best.intercept))
            continue
        cuts = [piece.lo, piece.hi]
        for i, c in enumerate(cands):
            for d in cands[i + 1:]:
                if c.slope != d.slope:
                    z = (d.intercept - c.intercept) / (c.slope - d.slope)
                    if piece.lo < z < piece.hi:
                        cuts.append(z)
        for sub in elementary_pieces(cuts):
            if sub.lo < piece.lo or sub.hi > piece.hi or sub.is_empty:
                continue
            if sub.is_point and sub.lo in (piece.lo, piece.hi):
                continue
            y = sub.sample_point()
            best = cands[0]
            for c in cands[1:]:
                if better(c.at(y), best.at(y)):
                    best = c
            out.append(Cell(sub, best.slope, best.intercept))
    return out
