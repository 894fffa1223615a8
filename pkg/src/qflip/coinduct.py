"""Mechanized coinduction for guarded piecewise-affine properties.

A closed property phi of one function E (or a pair E, E') is written as a
conjunction of guarded clauses. The fixpoint of tau(E) = a + r E(f) satisfies
phi as soon as

* some function satisfies phi (``check_nonempty``),
* phi(E) implies phi(tau(E)) for every E (``check_preservation``), and
* the weights are uniformly below 1 (``spectral_bound < 1``).

Preservation is decided clause by clause: for each clause we pull back the
strongest bounds the other clauses give at f(q) and compare exactly with
:func:`qflip.pwaffine.first_violation`. The derivation for a cross bound
E <= E' follows a fixed chain: relocate E's argument with a shift equality,
bound it above (directly or through E' via the cross clause), and bound E'
below by the lower-bound clauses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import UnsupportedClauseCombination
from .intervals import (ONE, UNIT, ZERO, Cell, Interval, covering_gap,
                        elementary_pieces, to_rational)
from .process import PiecewiseRecurrence, make_builtin, unwind
from .pwaffine import (PwAffine, aligned, compose_cells, envelope,
                       first_violation)
from .solve import spectral_bound

FIRST, SECOND = 0, 1


@dataclass(frozen=True)
class UpperBound:
    bound: PwAffine


@dataclass(frozen=True)
class LowerBound:
    bound: PwAffine


@dataclass(frozen=True)
class CrossBound:
    """first(q) <= second(q) on the guard."""


@dataclass(frozen=True)
class ShiftEquality:
    offset: Fraction


Form = Union[UpperBound, LowerBound, CrossBound, ShiftEquality]


@dataclass(frozen=True)
class Clause:
    guard: Interval
    subject: int
    form: Form
    label: str = ""

    def __post_init__(self):
        g = self.guard
        if g.is_empty or g.lo < 0 or g.hi > 1:
            raise ValueError(f"guard {g} must be a non-empty subset of [0, 1]")
        if self.subject not in (FIRST, SECOND):
            raise ValueError("subject must be 0 (first) or 1 (second)")
        if isinstance(self.form, ShiftEquality):
            o = self.form.offset
            if g.lo + o < 0 or g.hi + o > 1:
                raise ValueError(f"shift by {o} leaves [0, 1] on guard {g}")


@dataclass(frozen=True)
class PropertySpec:
    arity: int
    clauses: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        if self.arity == 1:
            for cl in self.clauses:
                if cl.subject != FIRST or isinstance(cl.form, CrossBound):
                    raise ValueError(f"clause {cl.label!r} needs a second function")


class Status(str, enum.Enum):
    VERIFIED = "Verified"
    VIOLATION = "Violation"
    # a premise other than preservation failed (no witness point)
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Witness:
    clause: str
    q: Fraction
    lhs: Fraction
    rhs: Fraction
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    status: Status
    witness: Optional[Witness]
    spectral_ok: bool
    label: str = ""
    nonempty: Optional[tuple] = None
    n: int = 1
    notes: tuple = field(default=())

    @property
    def verified(self) -> bool:
        return self.status is Status.VERIFIED


# --------------------------------------------------------------------------
# bound sources
# --------------------------------------------------------------------------

def _shifted(iv: Interval, o: Fraction) -> Interval:
    return Interval(iv.lo + o, iv.hi + o, iv.lo_closed, iv.hi_closed)


def _direct_sources(spec: PropertySpec, s: int, kind: str) -> list:
    form_cls = UpperBound if kind == "upper" else LowerBound
    out = [cl.form.bound.restrict(cl.guard) for cl in spec.clauses
           if cl.subject == s and isinstance(cl.form, form_cls)]
    # first <= second passes upper bounds of second to first, lower bounds of first to second
    via = (s == FIRST and kind == "upper") or (s == SECOND and kind == "lower")
    if via:
        other = 1 - s
        for cross in spec.clauses:
            if not isinstance(cross.form, CrossBound):
                continue
            for cl in spec.clauses:
                if cl.subject == other and isinstance(cl.form, form_cls):
                    out.append(cl.form.bound.restrict(cl.guard.intersect(cross.guard)))
    return [src for src in out if src]


def bound_envelope(spec: PropertySpec, s: int, kind: str) -> list:
    """Strongest upper/lower bound on function ``s`` derivable from ``spec``.

    Sources are the direct bound clauses, the other function's bounds passed
    through a cross clause, and both of those relocated once through each
    shift equality (E(y) = E(y + o) on the guard, E(y) = E(y - o) on its image).
    """
    base = _direct_sources(spec, s, kind)
    sources = list(base)
    for cl in spec.clauses:
        if cl.subject != s or not isinstance(cl.form, ShiftEquality):
            continue
        o = cl.form.offset
        for src in base:
            sources.append(compose_cells(src, ONE, o, cl.guard))
            sources.append(compose_cells(src, ONE, -o, _shifted(cl.guard, o)))
    return envelope([src for src in sources if src], kind)


def _tau_cells(env: Sequence[Cell], rec: PiecewiseRecurrence, domain: Interval,
               coeff=None, offset=None) -> list:
    """Cells of ``q -> A(q) + R(q) * env(f(q))`` over ``domain``.

    By default A = a and R = r of the piece containing q; ``coeff``/``offset``
    override them with callables of the piece.
    """
    out = []
    for pc in rec.pieces:
        dom = pc.interval.intersect(domain)
        if dom.is_empty:
            continue
        k = pc.r if coeff is None else coeff(pc)
        c0 = pc.a if offset is None else offset(pc)
        for cell in compose_cells(env, pc.f_slope, pc.f_intercept, dom):
            out.append(Cell(cell.iv, k * cell.slope, k * cell.intercept + c0))
    return out


def _gap(domain: Interval, cells: Sequence[Cell]) -> Optional[Fraction]:
    return covering_gap(domain, [c.iv for c in cells])


# --------------------------------------------------------------------------
# premises
# --------------------------------------------------------------------------

def _shift_holds(E: PwAffine, guard: Interval, o: Fraction) -> bool:
    here = E.restrict(guard)
    there = compose_cells(E.cells, ONE, o, guard)
    pairs = aligned(here, there, guard)
    return (first_violation(pairs) is None
            and first_violation([(iv, r, l) for iv, l, r in pairs]) is None)


def _satisfies(spec: PropertySpec, funcs: Sequence[PwAffine]) -> bool:
    for cl in spec.clauses:
        g, form = cl.guard, cl.form
        E = funcs[cl.subject]
        if isinstance(form, UpperBound):
            ok = first_violation(aligned(E.restrict(g), form.bound.restrict(g), g)) is None
        elif isinstance(form, LowerBound):
            ok = first_violation(aligned(form.bound.restrict(g), E.restrict(g), g)) is None
        elif isinstance(form, CrossBound):
            ok = first_violation(aligned(funcs[FIRST].restrict(g),
                                         funcs[SECOND].restrict(g), g)) is None
        else:
            ok = _shift_holds(E, g, form.offset)
        if not ok:
            return False
    return True


def _candidates(spec: PropertySpec) -> list:
    cands = [PwAffine.constant(0)]
    for cl in spec.clauses:
        if isinstance(cl.form, (UpperBound, LowerBound)) and cl.form.bound not in cands:
            cands.append(cl.form.bound)
    return cands


def check_nonempty(spec: PropertySpec) -> Optional[tuple]:
    """Search constant-zero and the clause bound functions for a model of phi.

    Returns a tuple of ``arity`` PwAffine functions, or ``None`` if no
    candidate combination satisfies every clause.
    """
    cands = _candidates(spec)
    if spec.arity == 1:
        for E in cands:
            if _satisfies(spec, (E,)):
                return (E,)
        return None
    for E in cands:
        for E2 in cands:
            if _satisfies(spec, (E, E2)):
                return (E, E2)
    return None


def _check_bound(spec, cl, rec, kind) -> Optional[Witness]:
    g, bound = cl.guard, cl.form.bound
    env = bound_envelope(spec, cl.subject, kind)
    tcells = _tau_cells(env, rec, g)
    hole = _gap(g, tcells)
    if hole is not None:
        # E is unconstrained at f(hole) in this direction: pick a value breaking the clause
        b = bound(hole)
        if kind == "upper":
            return Witness(cl.label, hole, b + 1, b, "unconstrained above at f(q)")
        return Witness(cl.label, hole, b, b - 1, "unconstrained below at f(q)")
    if kind == "upper":
        pairs = aligned(tcells, bound.restrict(g), g)
    else:
        pairs = aligned(bound.restrict(g), tcells, g)
    hit = first_violation(pairs)
    return None if hit is None else Witness(cl.label, *hit)


def _check_shift(spec, cl, rec) -> Optional[Witness]:
    g, o = cl.guard, cl.form.offset
    related = [c.guard for c in spec.clauses
               if c.subject == cl.subject and isinstance(c.form, ShiftEquality)]
    pts = [g.lo, g.hi]
    for pc in rec.pieces:
        pts += [pc.lo, pc.hi, pc.lo - o, pc.hi - o]
    for piece in elementary_pieces(pts):
        q = piece.sample_point()
        if q not in g:
            continue
        _, P = rec.piece_at(q)
        _, Q = rec.piece_at(q + o)
        f_here = (P.f_slope, P.f_intercept)
        f_there = (Q.f_slope, Q.f_slope * o + Q.f_intercept)
        if P.r != Q.r:
            return Witness(cl.label, q, P.r, Q.r, "weights differ")
        if P.a != Q.a:
            return Witness(cl.label, q, P.a, Q.a, "additive terms differ")
        if f_here == f_there:
            continue
        # maps differ: acceptable only if the images are related by this shift
        ok = False
        for sign, dom_of in ((1, lambda G: G), (-1, lambda G: _shifted(G, o))):
            if (f_there[0] == f_here[0] and f_there[1] == f_here[1] + sign * o):
                img = piece.image(*f_here)
                if any(img.intersect(dom_of(G)) == img for G in related):
                    ok = True
        if not ok:
            x = q if piece.is_point else (piece.lo + piece.hi) / 2
            lhs = f_here[0] * x + f_here[1]
            rhs = f_there[0] * x + f_there[1]
            if lhs == rhs:
                x = (3 * piece.lo + piece.hi) / 4
                lhs = f_here[0] * x + f_here[1]
                rhs = f_there[0] * x + f_there[1]
            return Witness(cl.label, x, lhs, rhs, "images f(q), f(q+offset) differ")
    return None


def _cross_obligations(spec, cl, rec1, rec2) -> list:
    g = cl.guard
    upper1 = bound_envelope(spec, FIRST, "upper")
    lower2 = bound_envelope(spec, SECOND, "lower")
    cross_guards = [c.guard for c in spec.clauses if isinstance(c.form, CrossBound)]
    pairs = []

    def need(domain, lhs, rhs, what):
        for cells, side in ((lhs, "left"), (rhs, "right")):
            hole = _gap(domain, cells)
            if hole is not None:
                raise UnsupportedClauseCombination(
                    f"clause {cl.label!r}: no {what} bound for the {side} side at q={hole}")
        pairs.extend(aligned(lhs, rhs, domain))

    for P in rec1.pieces:
        for Q in rec2.pieces:
            cell = g.intersect(P.interval).intersect(Q.interval)
            if cell.is_empty:
                continue
            single1 = PiecewiseRecurrence((P,), rec1.p)
            single2 = PiecewiseRecurrence((Q,), rec2.p)
            same = (P.f_slope, P.f_intercept) == (Q.f_slope, Q.f_intercept)
            covered = []
            if same:
                for cg in cross_guards:
                    sub = cg.preimage(P.f_slope, P.f_intercept, cell)
                    if sub.is_empty:
                        continue
                    covered.append(sub)
                    const = lambda v: [Cell(sub, ZERO, v)]
                    if P.r == Q.r:
                        need(sub, const(P.a), const(Q.a), "additive")
                    elif P.r < Q.r:
                        lhs = _tau_cells(lower2, single1, sub,
                                         coeff=lambda pc, d=P.r - Q.r: d)
                        need(sub, lhs, const(Q.a), "lower")
                    else:
                        lhs = _tau_cells(upper1, single1, sub,
                                         coeff=lambda pc, d=P.r - Q.r: d)
                        need(sub, lhs, const(Q.a), "upper")
            pts = [cell.lo, cell.hi] + [e for iv in covered for e in (iv.lo, iv.hi)]
            for piece in elementary_pieces(pts):
                x = piece.sample_point()
                if x not in cell or any(x in iv for iv in covered):
                    continue
                lhs = _tau_cells(upper1, single1, piece)
                rhs = _tau_cells(lower2, single2, piece)
                need(piece, lhs, rhs, "upper/lower")
    pairs.sort(key=lambda t: t[0].sort_key())
    return pairs


def check_preservation(spec: PropertySpec, recs: Sequence[PiecewiseRecurrence]) -> VerificationReport:
    """Decide phi(E) => phi(tau(E)) clause by clause (first failure wins)."""
    recs = tuple(recs)
    if len(recs) != spec.arity:
        raise ValueError(f"spec has arity {spec.arity} but {len(recs)} recurrences given")
    spectral_ok = all(spectral_bound(r) < 1 for r in recs)
    for cl in spec.clauses:
        form = cl.form
        if isinstance(form, UpperBound):
            w = _check_bound(spec, cl, recs[cl.subject], "upper")
        elif isinstance(form, LowerBound):
            w = _check_bound(spec, cl, recs[cl.subject], "lower")
        elif isinstance(form, ShiftEquality):
            w = _check_shift(spec, cl, recs[cl.subject])
        else:
            hit = first_violation(_cross_obligations(spec, cl, recs[FIRST], recs[SECOND]))
            w = None if hit is None else Witness(cl.label, *hit)
        if w is not None:
            return VerificationReport(Status.VIOLATION, w, spectral_ok, spec.label)
    return VerificationReport(Status.VERIFIED, None, spectral_ok, spec.label)


def preservation_n(spec: PropertySpec, recs: Sequence[PiecewiseRecurrence], n: int) -> VerificationReport:
    """Preservation under tau^n, via the unwound recurrences."""
    unwound = [rec if n == 1 else unwind(rec, n) for rec in recs]
    rep = check_preservation(spec, unwound)
    spectral_ok = all(spectral_bound(r) < 1 for r in recs)
    return VerificationReport(rep.status, rep.witness, spectral_ok, spec.label, n=n)


def conclude(spec: PropertySpec, recs: Sequence[PiecewiseRecurrence],
             nonempty: Optional[tuple], preservation: VerificationReport) -> VerificationReport:
    """Combine the premises: Verified means phi holds of the bounded fixpoint(s)."""
    spectral_ok = all(spectral_bound(r) < 1 for r in recs)
    notes = []
    if nonempty is None:
        notes.append("no model of the property found")
    if not spectral_ok:
        notes.append("a weight reaches 1: no contraction")
    if preservation.status is Status.VIOLATION:
        status = Status.VIOLATION
    elif notes or preservation.status is not Status.VERIFIED:
        status = Status.INCONCLUSIVE
    else:
        status = Status.VERIFIED
    return VerificationReport(status, preservation.witness, spectral_ok, spec.label,
                              nonempty, preservation.n, tuple(notes))


def verify(spec: PropertySpec, recs: Sequence[PiecewiseRecurrence], n: int = 1) -> VerificationReport:
    """Run both premises and the contraction check."""
    recs = tuple(recs)
    return conclude(spec, recs, check_nonempty(spec), preservation_n(spec, recs, n))


# --------------------------------------------------------------------------
# built-in properties
# --------------------------------------------------------------------------

def e0_line(p) -> PwAffine:
    p = to_rational(p)
    return PwAffine.affine(1 / p - 1 / (1 - p), 1 / (1 - p))


def spec_e1_le_e0(p) -> PropertySpec:
    clause = Clause(UNIT, FIRST, UpperBound(e0_line(p)), "E<=E0*")
    return PropertySpec(1, (clause,), "E1_le_E0")


def spec_pair_e3_le_e1(p) -> PropertySpec:
    p = to_rational(p)
    clauses = (
        Clause(UNIT, FIRST, CrossBound(), "IH1"),
        Clause(UNIT, FIRST, LowerBound(PwAffine.constant(1 / (1 - p))), "IH2"),
        Clause(Interval(p, 1 - p, False, False), SECOND,
               LowerBound(PwAffine.constant(2)), "IH3"),
        Clause(UNIT, SECOND, UpperBound(e0_line(p)), "IH4"),
        Clause(Interval(ZERO, p, True, True), FIRST, ShiftEquality(1 - p), "IH5"),
    )
    return PropertySpec(2, clauses, "pair_E3_le_E1")


def spec_jump_bound(p) -> PropertySpec:
    """E <= 1/p everywhere and E <= 1 + 2p just right of 1 - p."""
    p = to_rational(p)
    clauses = (
        Clause(UNIT, FIRST, UpperBound(PwAffine.constant(1 / p)), "E<=1/p"),
        Clause(Interval(1 - p, 1 - p + p * p, False, False), FIRST,
               UpperBound(PwAffine.constant(1 + 2 * p)), "E<=1+2p"),
    )
    return PropertySpec(1, clauses, "jump_bound")


BUILTIN_SPECS = ("E1_le_E0", "pair_E3_le_E1")


def builtin_pipeline(name: str, p, c=None) -> tuple:
    """(spec, recurrences) for a named showcase proof.

    For ``pair_E3_le_E1`` a breakpoint of exactly 1/2 selects E2 (the
    breakpoint-1/2 variant) as the first recurrence.
    """
    p = to_rational(p)
    if name == "E1_le_E0":
        return spec_e1_le_e0(p), (make_builtin("E1", p),)
    if name == "pair_E3_le_E1":
        c = None if c is None else to_rational(c)
        first = make_builtin("E2", p) if c == Fraction(1, 2) else make_builtin("E3", p, c)
        return spec_pair_e3_le_e1(p), (first, make_builtin("E1", p))
    if name == "jump_bound":
        return spec_jump_bound(p), (make_builtin("E1", p),)
    raise KeyError(f"unknown builtin spec {name!r}")
