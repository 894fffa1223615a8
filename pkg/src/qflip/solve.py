"""Certified evaluation of the bounded fixpoint E* and related probes.

E*(q) is the series ``sum_n a(f^n q) prod_{i<n} r(f^i q)``. After N terms the
remainder is ``W_N * E*(f^N q)`` where ``W_N`` is the accumulated weight, and
``inf_a/(1 - min r) <= E* <= sup_a/(1 - max r)`` everywhere, so the partial
sum plus those two multiples of ``W_N`` is an exact rational enclosure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .errors import NotFound, OutOfDomain
from .intervals import ONE, ZERO, to_rational
from .orbit import forced_orbit_values, preimages
from .process import PiecewiseRecurrence, compile_map, eval_map, unwind

EPS_FLOOR = Fraction(1, 10**12)
DEFAULT_EPS = Fraction(1, 10**9)
JUMP_SIDE = Fraction(1, 10**12)


@dataclass(frozen=True)
class CertifiedValue:
    lower: Fraction
    upper: Fraction
    terms_used: int

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


class Verdict(str, enum.Enum):
    A_BELOW_B = "A_below_B"
    B_BELOW_A = "B_below_A"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ComparisonRow:
    q: Fraction
    a_value: CertifiedValue
    b_value: CertifiedValue
    verdict: Verdict


def _tail_factors(rec: PiecewiseRecurrence):
    c_max, c_min = rec.c_max, rec.c_min
    if c_max >= 1:
        raise ValueError(f"{rec.label}: max weight {c_max} >= 1, series may diverge")
    return rec.inf_a / (1 - c_min), rec.sup_a / (1 - c_max)


def series_eval(rec: PiecewiseRecurrence, q, eps=DEFAULT_EPS, *,
                detect_cycles: bool = False, max_terms: Optional[int] = None) -> CertifiedValue:
    """Enclose E*(q) in an interval of width at most ``eps``.

    With ``detect_cycles`` the evaluation stops as soon as the orbit revisits
    a point and returns the exact forced value (``lower == upper``).
    """
    q, eps = to_rational(q), to_rational(eps)
    if not (ZERO <= q <= ONE):
        raise OutOfDomain(f"q={q} is outside [0, 1]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    lo_fac, hi_fac = _tail_factors(rec)
    spread = hi_fac - lo_fac
    cm = compile_map(rec)
    ra = [(pc.r.numerator, pc.r.denominator, pc.a) for pc in rec.pieces]
    a_den = math.lcm(*(a.denominator for _, _, a in ra))
    ra = [(rn, rd, a.numerator * (a_den // a.denominator)) for rn, rd, a in ra]
    # weight = wn/wd and partial sum = tn/(wd*a_den), both unreduced
    wn, wd, tn = 1, 1, 0
    x_n, x_d = q.numerator, q.denominator
    # stop once wn/wd * spread <= eps, i.e. wn * s_n * e_d <= e_n * s_d * wd
    lhs_k, rhs_k = spread.numerator * eps.denominator, eps.numerator * spread.denominator
    n = 0
    seen = {(x_n, x_d)} if detect_cycles else None
    while wn * lhs_k > rhs_k * wd:
        if max_terms is not None and n >= max_terms:
            break
        i = cm.locate(x_n, x_d)
        rn, rd, a_int = ra[i]
        tn = (tn + a_int * wn) * rd
        wn, wd = wn * rn, wd * rd
        x_n, x_d = cm.step(x_n, x_d, i)
        n += 1
        if seen is not None:
            if (x_n, x_d) in seen:
                exact = forced_orbit_values(rec, q, n + 1)[q]
                return CertifiedValue(exact, exact, n)
            seen.add((x_n, x_d))
    total, weight = Fraction(tn, wd * a_den), Fraction(wn, wd)
    return CertifiedValue(total + weight * lo_fac, total + weight * hi_fac, n)


def partial_sum(rec: PiecewiseRecurrence, q, terms: int) -> Fraction:
    """Plain N-term partial sum, i.e. tau^N(0)(q)."""
    total, weight, x = ZERO, ONE, to_rational(q)
    for _ in range(terms):
        f_x, r_x, a_x, _ = eval_map(rec, x)
        total += a_x * weight
        weight *= r_x
        x = f_x
    return total


def spectral_bound(rec: PiecewiseRecurrence) -> Fraction:
    """Largest weight; bounds the norm (hence spectral radius) of E -> r E(f)."""
    return rec.c_max


def power_norm(rec: PiecewiseRecurrence, n: int) -> Fraction:
    """Exact sup-norm of the n-th power of E -> r E(f).

    Equals the largest accumulated weight over the pieces of ``unwind(rec, n)``;
    ``power_norm(rec, n) ** (1/n)`` is an upper bound on the spectral radius
    for every n.
    """
    return max(pc.r for pc in unwind(rec, n).pieces)


def _verdict(a: CertifiedValue, b: CertifiedValue) -> Verdict:
    if a.upper < b.lower:
        return Verdict.A_BELOW_B
    if b.upper < a.lower:
        return Verdict.B_BELOW_A
    return Verdict.UNDETERMINED


def compare_strategies(rec_a: PiecewiseRecurrence, rec_b: PiecewiseRecurrence,
                       qs: Iterable, eps=DEFAULT_EPS, *,
                       eps_floor=None) -> list:
    """Certified pointwise ordering of two fixpoints.

    Overlapping enclosures give ``Undetermined``. If ``eps_floor`` is set,
    such points are re-evaluated with eps divided by 1000 until they separate
    or eps would drop below the floor (never below :data:`EPS_FLOOR`).
    """
    eps = to_rational(eps)
    floor = None if eps_floor is None else max(to_rational(eps_floor), EPS_FLOOR)
    rows = []
    for q in qs:
        q = to_rational(q)
        cur = eps
        while True:
            a, b = series_eval(rec_a, q, cur), series_eval(rec_b, q, cur)
            verdict = _verdict(a, b)
            if verdict is not Verdict.UNDETERMINED or floor is None or cur / 1000 < floor:
                break
            cur /= 1000
        rows.append(ComparisonRow(q, a, b, verdict))
    return rows


def _separation(x: CertifiedValue, y: CertifiedValue) -> Fraction:
    return max(x.lower - y.upper, y.lower - x.upper, ZERO)


def discontinuity_gap(rec: PiecewiseRecurrence, q0, side_eps, eps=None) -> Fraction:
    """Certified lower bound on the oscillation of E* across q0.

    Encloses E* at q0 - side_eps, q0 and q0 + side_eps and returns the
    largest certified separation between any two of the three. A continuous
    E* gives 0 once its variation over the window is below ``eps``; a larger
    window reports ordinary variation as well as jumps.
    """
    q0, side_eps = to_rational(q0), to_rational(side_eps)
    if not (ZERO < q0 < ONE):
        raise ValueError("q0 must lie in (0, 1)")
    if not (ZERO < side_eps < rec.p ** 2):
        raise ValueError(f"side_eps must lie in (0, p^2) = (0, {rec.p ** 2})")
    eps = DEFAULT_EPS if eps is None else to_rational(eps)
    pts = [q for q in (q0 - side_eps, q0, q0 + side_eps) if ZERO <= q <= ONE]
    encl = [series_eval(rec, q, eps) for q in pts]
    best = ZERO
    for i in range(len(encl)):
        for j in range(i + 1, len(encl)):
            best = max(best, _separation(encl[i], encl[j]))
    return best


@dataclass(frozen=True)
class DiscontinuityWitness:
    point: Fraction
    gap: Fraction
    steps: int
    breakpoint: Fraction


def step_bound(width, p) -> int:
    """Forward steps needed for an interval of ``width`` to outgrow a piece."""
    width, p = to_rational(width), to_rational(p)
    return math.ceil(math.log(width) / math.log(1 - p))


def _persistent_jump(rec: PiecewiseRecurrence, beta: Fraction, side: Fraction) -> Fraction:
    """Separation at ``beta`` that survives shrinking the window 1000-fold.

    Variation of a continuous E* shrinks with the window; a jump does not.
    Returns 0 when the separation at the smaller scale falls below half of
    the separation at the larger one.
    """
    wide = discontinuity_gap(rec, beta, side)
    if wide == 0:
        return ZERO
    narrow = discontinuity_gap(rec, beta, side / 1000, eps=wide / 8)
    return narrow if 2 * narrow >= wide else ZERO


def find_discontinuity_in(rec: PiecewiseRecurrence, a, b, budget: Optional[int] = None,
                          *, side_eps=None) -> DiscontinuityWitness:
    """Locate a point of (a, b) across which E* provably jumps.

    The open interval is pushed forward under f (on which it is affine while
    no breakpoint lies inside) until it straddles a breakpoint. The jump there
    is pulled back through the composed affine map and certified directly at
    the pulled-back point with :func:`discontinuity_gap`. Straddled breakpoints
    without a certified jump split the interval and the search continues.
    """
    a, b = to_rational(a), to_rational(b)
    if not (ZERO <= a < b <= ONE):
        raise ValueError("need 0 <= a < b <= 1")
    p = rec.p
    if budget is None:
        budget = step_bound(b - a, p) + 8
    # a tiny offset keeps the drift of a continuous E* below the enclosure
    # width, so only genuine jumps produce a positive separation
    base_side = min(p ** 2 / 2, JUMP_SIDE) if side_eps is None else to_rational(side_eps)
    bps = rec.breakpoints()
    jump_at = {}

    # (lo, hi) of the current image, composite map slope/intercept, weight, steps
    work = [(a, b, ONE, ZERO, ONE, 0)]
    processed = 0
    while work:
        lo, hi, slope, icpt, weight, steps = work.pop(0)
        processed += 1
        if processed > budget:
            break
        inside = [x for x in bps if lo < x < hi]
        if inside:
            beta = inside[0]
            if beta not in jump_at:
                jump_at[beta] = _persistent_jump(rec, beta, base_side)
            if jump_at[beta] > 0:
                x = (beta - icpt) / slope
                side = min(x - a, b - x, base_side / abs(slope)) / 2
                gap = discontinuity_gap(rec, x, side, eps=weight * jump_at[beta] / 8)
                if gap > 0:
                    return DiscontinuityWitness(x, gap, steps, beta)
            for sub_lo, sub_hi in ((lo, beta), (beta, hi)):
                work.append((sub_lo, sub_hi, slope, icpt, weight, steps))
            continue
        if steps >= budget:
            continue
        mid = (lo + hi) / 2
        f_mid, r_mid, _, idx = eval_map(rec, mid)
        pc = rec.pieces[idx]
        new_lo, new_hi = sorted((pc.f(lo), pc.f(hi)))
        work.append((new_lo, new_hi, pc.f_slope * slope, pc.f_slope * icpt + pc.f_intercept,
                     weight * r_mid, steps + 1))
    raise NotFound(f"no certified discontinuity found in ({a}, {b}) within budget {budget}")


def plot_grid(rec: PiecewiseRecurrence, points: int, refine: bool = False) -> list:
    """Equally spaced rationals i/(points-1); optionally plus breakpoints and
    three generations of their preimages, so both sides of jumps are sampled."""
    if points < 2:
        raise ValueError("points must be >= 2")
    grid = {Fraction(i, points - 1) for i in range(points)}
    if refine:
        layer = set(rec.breakpoints())
        grid |= layer
        for _ in range(3):
            layer = {x for y in layer for x in preimages(rec, y)}
            grid |= layer
    return sorted(grid)


def plot_series(rec: PiecewiseRecurrence, points: int, eps=DEFAULT_EPS,
                refine: bool = False) -> list:
    """Rows (q, lower, upper) of certified enclosures over a uniform grid."""
    rows = []
    for q in plot_grid(rec, points, refine):
        cv = series_eval(rec, q, eps)
        rows.append((q, cv.lower, cv.upper))
    return rows
