"""Exact orbit analysis of q, f(q), f(f(q)), ...

Orbits that revisit a point lie in a *rational* component of the graph
q -> f(q); there every solution of the recurrence is forced to a single exact
value. Orbits that never cycle admit arbitrary (unbounded) extensions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (DivergentWeight, ForcedConflict, InfinitePreimage,
                     NoCycleFound, NotEigenApplicable, OutOfDomain)
from .intervals import ONE, ZERO, to_rational
from .process import PiecewiseRecurrence, eval_map

DEFAULT_MAX_STEPS = 10_000


class Classification(str, enum.Enum):
    RATIONAL = "Rational"
    NO_CYCLE = "NoCycleWithinBudget"


@dataclass(frozen=True)
class OrbitReport:
    points: tuple
    cycle_entry: Optional[int]
    cycle_length: Optional[int]
    classification: Classification

    @property
    def has_cycle(self) -> bool:
        return self.classification is Classification.RATIONAL

    @property
    def cycle(self) -> tuple:
        if not self.has_cycle:
            return ()
        m, k = self.cycle_entry, self.cycle_length
        return self.points[m:m + k]


@dataclass(frozen=True)
class ForcedValue:
    at: Fraction
    value: Fraction
    via_cycle: tuple  # (entry point, cycle length)


def orbit_trace(rec: PiecewiseRecurrence, q, max_steps: int = DEFAULT_MAX_STEPS) -> OrbitReport:
    q = to_rational(q)
    if not (ZERO <= q <= ONE):
        raise OutOfDomain(f"q={q} is outside [0, 1]")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    points = [q]
    seen = {q: 0}
    x = q
    for _ in range(max_steps):
        x = eval_map(rec, x).f_q
        points.append(x)
        if x in seen:
            m = seen[x]
            return OrbitReport(tuple(points), m, len(points) - 1 - m,
                               Classification.RATIONAL)
        seen[x] = len(points) - 1
    return OrbitReport(tuple(points), None, None, Classification.NO_CYCLE)


def _cycle_value(rec: PiecewiseRecurrence, entry: Fraction, k: int) -> Fraction:
    # E(x) = (sum_{n<k} a_n W_n) / (1 - W_k) along the cycle from x
    total, weight, x = ZERO, ONE, entry
    for _ in range(k):
        f_x, r_x, a_x, _ = eval_map(rec, x)
        total += a_x * weight
        weight *= r_x
        x = f_x
    if x != entry:
        raise AssertionError("cycle does not close")
    if weight >= 1:
        raise DivergentWeight(f"cycle weight {weight} >= 1 at {entry}")
    return total / (1 - weight)


def forced_orbit_values(rec: PiecewiseRecurrence, q,
                        max_steps: int = DEFAULT_MAX_STEPS) -> dict:
    """Exact solution values at every point of q's orbit (which must cycle)."""
    rep = orbit_trace(rec, q, max_steps)
    if not rep.has_cycle:
        raise NoCycleFound(f"orbit of {q} has no cycle within {max_steps} steps")
    m, k = rep.cycle_entry, rep.cycle_length
    pts = rep.points
    values = {pts[m]: _cycle_value(rec, pts[m], k)}
    for j in range(m + k - 1, m, -1):  # remaining cycle points, backwards
        _, r, a, _ = eval_map(rec, pts[j])
        values[pts[j]] = a + r * values[pts[j + 1]]
    for j in range(m - 1, -1, -1):
        _, r, a, _ = eval_map(rec, pts[j])
        values[pts[j]] = a + r * values[pts[j + 1]]
    return values


def forced_value(rec: PiecewiseRecurrence, q, max_steps: int = DEFAULT_MAX_STEPS) -> ForcedValue:
    q = to_rational(q)
    rep = orbit_trace(rec, q, max_steps)
    if not rep.has_cycle:
        raise NoCycleFound(f"orbit of {q} has no cycle within {max_steps} steps")
    values = forced_orbit_values(rec, q, max_steps)
    return ForcedValue(q, values[q], (rep.points[rep.cycle_entry], rep.cycle_length))


def preimages(rec: PiecewiseRecurrence, y) -> list:
    """All x in [0, 1] with f(x) = y, sorted."""
    y = to_rational(y)
    out = set()
    for pc in rec.pieces:
        if pc.f_slope == 0:
            if pc.f_intercept == y and not pc.interval.is_empty:
                raise InfinitePreimage(f"every point of {pc.interval} maps to {y}")
            continue
        x = (y - pc.f_intercept) / pc.f_slope
        if pc.contains(x):
            out.add(x)
    return sorted(out)


def eigenfunction_samples(rec: PiecewiseRecurrence, depth: int) -> list:
    """Samples of E on the backward tree of the fixed point 1.

    ``E(1) = 1`` and ``E(x) = r(x) E(f(x)) / lam`` for every other x in the
    tree, where ``lam`` is the largest weight of ``rec`` (1 - p for E1). The
    identity ``r(x) E(f(x)) = lam E(x)`` therefore holds at every sample
    except the root itself, where the left side is ``r(1) E(1)``.
    """
    one = ONE
    if eval_map(rec, one).f_q != one:
        raise NotEigenApplicable("1 is not a fixed point of the map")
    lam = rec.c_max
    values = {one: one}
    out = [(one, one)]
    frontier = [one]
    for _ in range(depth):
        nxt = []
        for y in frontier:
            for x in preimages(rec, y):
                if x in values:
                    continue
                values[x] = eval_map(rec, x).r_q * values[y] / lam
                out.append((x, values[x]))
                nxt.append(x)
        frontier = nxt
    return out


def extend_unbounded(rec: PiecewiseRecurrence, q0, v0, depth: int) -> list:
    """Propagate E(q0) = v0 forward along the orbit for ``depth`` steps.

    Uses ``E(f(q)) = (E(q) - a(q)) / r(q)``. If the orbit cycles within
    ``depth`` steps the value at q0 is forced and must equal ``v0``.
    """
    q0, v0 = to_rational(q0), to_rational(v0)
    rep = orbit_trace(rec, q0, max(depth, 1))
    if rep.has_cycle:
        forced = forced_orbit_values(rec, q0, max(depth, 1))[q0]
        if forced != v0:
            raise ForcedConflict(q0, v0, forced)
    out = [(q0, v0)]
    q, v = q0, v0
    for _ in range(depth):
        f_q, r_q, a_q, _ = eval_map(rec, q)
        q, v = f_q, (v - a_q) / r_q
        out.append((q, v))
    return out
