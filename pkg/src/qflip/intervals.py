"""Exact intervals with endpoint ownership, and affine-cell refinement.

Everything here works over :class:`fractions.Fraction`. An interval carries
explicit ``lo_closed``/``hi_closed`` flags because the discontinuities of the
functions we study sit exactly on interval boundaries.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(x) -> Fraction:
    """Coerce ints, strings ("11/20", "1e-9") and floats to a Fraction.

    Floats go through ``repr`` so ``1e-9`` becomes exactly 1/10**9 rather than
    the nearest binary double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(to_rational(lo), to_rational(hi), True, True)

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(to_rational(lo), to_rational(hi), False, False)

    @classmethod
    def point(cls, x) -> "Interval":
        x = to_rational(x)
        return cls(x, x, True, True)

    @property
    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi and self.lo_closed and self.hi_closed

    def __contains__(self, x) -> bool:
        if x < self.lo or (x == self.lo and not self.lo_closed):
            return False
        if x > self.hi or (x == self.hi and not self.hi_closed):
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_c = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lo_c = other.lo, other.lo_closed
        else:
            lo, lo_c = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_c = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hi_c = other.hi, other.hi_closed
        else:
            hi, hi_c = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_c, hi_c)

    def image(self, slope: Fraction, intercept: Fraction) -> "Interval":
        a = slope * self.lo + intercept
        b = slope * self.hi + intercept
        if slope >= 0:
            return Interval(a, b, self.lo_closed, self.hi_closed)
        return Interval(b, a, self.hi_closed, self.lo_closed)

    def preimage(self, slope: Fraction, intercept: Fraction,
                 within: "Interval") -> "Interval":
        """Points x of ``within`` with ``slope*x + intercept`` in self."""
        if slope == 0:
            return within if intercept in self else EMPTY
        a = (self.lo - intercept) / slope
        b = (self.hi - intercept) / slope
        if slope > 0:
            pre = Interval(a, b, self.lo_closed, self.hi_closed)
        else:
            pre = Interval(b, a, self.hi_closed, self.lo_closed)
        return pre.intersect(within)

    def sample_point(self) -> Fraction:
        """A rational point guaranteed to lie in a non-empty interval."""
        if self.is_point or self.lo_closed:
            return self.lo
        if self.hi_closed:
            return self.hi
        return (self.lo + self.hi) / 2

    def sort_key(self):
        # point [x,x] sorts before (x, ...); closed lo before open lo
        return (self.lo, not self.lo_closed, self.hi, self.hi_closed)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


UNIT = Interval(ZERO, ONE, True, True)
EMPTY = Interval(ONE, ZERO, False, False)


class Cell(NamedTuple):
    """An affine function ``slope*q + intercept`` on an interval."""

    iv: Interval
    slope: Fraction
    intercept: Fraction

    def at(self, q: Fraction) -> Fraction:
        return self.slope * q + self.intercept


def sorted_cells(cells: Iterable[Cell]) -> list:
    return sorted((c for c in cells if not c.iv.is_empty),
                  key=lambda c: c.iv.sort_key())


def elementary_pieces(endpoints: Iterable[Fraction]) -> Iterator[Interval]:
    """Points and open gaps between consecutive sorted endpoints."""
    pts = sorted(set(endpoints))
    for i, x in enumerate(pts):
        yield Interval(x, x, True, True)
        if i + 1 < len(pts):
            yield Interval(x, pts[i + 1], False, False)


class CellIndex:
    """Point lookup over disjoint cells (bisect on the lower endpoint)."""

    def __init__(self, cells: Sequence[Cell]):
        self.cells = sorted_cells(cells)
        self._los = [c.iv.lo for c in self.cells]

    def find(self, x: Fraction) -> Optional[Cell]:
        i = bisect.bisect_right(self._los, x)
        for j in range(i - 1, max(i - 3, -1), -1):
            c = self.cells[j]
            if x in c.iv:
                return c
        return None

    def endpoints(self):
        for c in self.cells:
            yield c.iv.lo
            yield c.iv.hi


def covering_gap(domain: Interval, cells: Sequence[Interval]) -> Optional[Fraction]:
    """Return a rational point of ``domain`` covered by none of ``cells``."""
    if domain.is_empty:
        return None
    endpoints = [domain.lo, domain.hi]
    for iv in cells:
        endpoints += [iv.lo, iv.hi]
    for piece in elementary_pieces(endpoints):
        x = piece.sample_point()
        if x in domain and not any(x in iv for iv in cells):
            return x
    return None


def affine_compose(outer_slope, outer_int, inner_slope, inner_int):
    """Coefficients of ``outer(inner(q))`` for two affine maps."""
    return outer_slope * inner_slope, outer_slope * inner_int + outer_int
