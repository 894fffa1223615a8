"""JSON forms of recurrences, properties and reports.

Rationals are always written as strings ("11/20", "1") so no value ever
passes through a binary float.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .coinduct import (FIRST, SECOND, Clause, CrossBound, LowerBound,
                       PropertySpec, ShiftEquality, UpperBound,
                       VerificationReport)
from .intervals import Cell, Interval
from .process import Piece, PiecewiseRecurrence, ensure_valid, make_builtin
from .pwaffine import PwAffine


def rational_text(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_text(x) -> str:
    """17-significant-digit rendering, for display only."""
    return f"{float(x):.17g}"


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"rationals must be strings, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


# --------------------------------------------------------------------------

def _interval_json(iv: Interval) -> dict:
    return {"lo": rational_text(iv.lo), "hi": rational_text(iv.hi),
            "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}


def _interval_from(d: dict) -> Interval:
    return Interval(parse_rational(d["lo"]), parse_rational(d["hi"]),
                    bool(d.get("lo_closed", True)), bool(d.get("hi_closed", True)))


def recurrence_to_config(rec: PiecewiseRecurrence) -> dict:
    pieces = []
    for pc in rec.pieces:
        d = _interval_json(pc.interval)
        d.update(f_slope=rational_text(pc.f_slope), f_intercept=rational_text(pc.f_intercept),
                 r=rational_text(pc.r), a=rational_text(pc.a))
        if pc.tag:
            d["tag"] = pc.tag
        pieces.append(d)
    return {"label": rec.label, "p": rational_text(rec.p), "pieces": pieces}


def recurrence_from_config(cfg: dict, validate: bool = True) -> PiecewiseRecurrence:
    """Build a recurrence from its config dict.

    A dict with a ``family`` key instead of ``pieces`` names a built-in.
    """
    if "family" in cfg:
        c = cfg.get("c")
        return make_builtin(cfg["family"], parse_rational(cfg["p"]),
                            None if c is None else parse_rational(c))
    pieces = []
    for d in cfg["pieces"]:
        pieces.append(Piece.on(_interval_from(d), parse_rational(d["f_slope"]),
                               parse_rational(d["f_intercept"]), parse_rational(d["r"]),
                               parse_rational(d["a"]), d.get("tag", "")))
    rec = PiecewiseRecurrence(pieces, parse_rational(cfg["p"]), cfg.get("label", ""))
    return ensure_valid(rec) if validate else rec


def pwaffine_to_json(g: PwAffine) -> list:
    return [dict(_interval_json(c.iv), slope=rational_text(c.slope),
                 intercept=rational_text(c.intercept)) for c in g.cells]


def pwaffine_from_json(data) -> PwAffine:
    """Accepts a cell list, ``{"constant": v}`` or ``{"slope": s, "intercept": t}``."""
    if isinstance(data, dict):
        if "constant" in data:
            return PwAffine.constant(parse_rational(data["constant"]))
        return PwAffine.affine(parse_rational(data["slope"]), parse_rational(data["intercept"]))
    return PwAffine(tuple(Cell(_interval_from(d), parse_rational(d["slope"]),
                               parse_rational(d["intercept"])) for d in data))


_SUBJECTS = {"first": FIRST, "second": SECOND}


def clause_to_json(cl: Clause) -> dict:
    d = {"label": cl.label, "guard": _interval_json(cl.guard),
         "subject": "first" if cl.subject == FIRST else "second"}
    f = cl.form
    if isinstance(f, UpperBound):
        d.update(form="upper", bound=pwaffine_to_json(f.bound))
    elif isinstance(f, LowerBound):
        d.update(form="lower", bound=pwaffine_to_json(f.bound))
    elif isinstance(f, CrossBound):
        d.update(form="cross")
    else:
        d.update(form="shift", offset=rational_text(f.offset))
    return d


def clause_from_json(d: dict) -> Clause:
    kind = d["form"]
    if kind == "upper":
        form = UpperBound(pwaffine_from_json(d["bound"]))
    elif kind == "lower":
        form = LowerBound(pwaffine_from_json(d["bound"]))
    elif kind == "cross":
        form = CrossBound()
    elif kind == "shift":
        form = ShiftEquality(parse_rational(d["offset"]))
    else:
        raise ValueError(f"unknown clause form {kind!r}")
    guard = _interval_from(d["guard"]) if "guard" in d else Interval.closed(0, 1)
    return Clause(guard, _SUBJECTS[d.get("subject", "first")], form, d.get("label", ""))


def spec_to_json(spec: PropertySpec) -> dict:
    return {"label": spec.label, "arity": spec.arity,
            "clauses": [clause_to_json(c) for c in spec.clauses]}


def spec_from_json(d: dict) -> PropertySpec:
    return PropertySpec(int(d["arity"]), tuple(clause_from_json(c) for c in d["clauses"]),
                        d.get("label", ""))


def report_to_json(rep: VerificationReport) -> dict:
    w = rep.witness
    out = {
        "label": rep.label,
        "status": rep.status.value,
        "spectral_ok": rep.spectral_ok,
        "n": rep.n,
        "witness": None if w is None else {
            "clause": w.clause, "q": rational_text(w.q),
            "lhs": rational_text(w.lhs), "rhs": rational_text(w.rhs),
            "note": w.note, "q_decimal": decimal_text(w.q),
        },
        "nonempty": None if rep.nonempty is None else [pwaffine_to_json(g) for g in rep.nonempty],
        "notes": list(rep.notes),
    }
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2)
