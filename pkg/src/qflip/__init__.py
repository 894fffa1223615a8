"""Exact analysis of piecewise-affine coin-simulation recurrences.

A recurrence ``E(q) = a(q) + r(q) E(f(q))`` on [0, 1] is described by a
:class:`PiecewiseRecurrence`. Its bounded fixpoint can be evaluated with
certified enclosures (:mod:`qflip.solve`), computed exactly along periodic
orbits (:mod:`qflip.orbit`), compared against other recurrences by
coinduction (:mod:`qflip.coinduct`) and estimated by simulation
(:mod:`qflip.montecarlo`).
"""

from .errors import (DivergentWeight, ForcedConflict, InfinitePreimage, InvalidBias,
                     InvalidBreakpoint, InvalidRecurrence, NoCycleFound, NonTermination,
                     NotEigenApplicable, NotFound, OutOfDomain, PieceExplosion, QflipError,
                     UnsupportedClauseCombination)
from .intervals import Interval, to_rational
from .process import (Family, Piece, PiecewiseRecurrence, e0_star, eval_map,
                      make_builtin, tau_power, unwind, validate)
from .orbit import (OrbitReport, eigenfunction_samples, extend_unbounded,
                    forced_orbit_values, forced_value, orbit_trace, preimages)
from .solve import (CertifiedValue, Verdict, compare_strategies, discontinuity_gap,
                    find_discontinuity_in, plot_series, power_norm, series_eval,
                    spectral_bound)
from .pwaffine import PwAffine, pw_compose, pw_leq
from .coinduct import (Clause, CrossBound, LowerBound, PropertySpec, ShiftEquality,
                       Status, UpperBound, VerificationReport, builtin_pipeline, verify)
from .montecarlo import BitSource, estimate_flips, estimate_heads, run_qflip

__version__ = "0.1.0"

__all__ = [
    "DivergentWeight", "ForcedConflict", "InfinitePreimage", "InvalidBias",
    "InvalidBreakpoint", "InvalidRecurrence", "NoCycleFound", "NonTermination",
    "NotEigenApplicable", "NotFound", "OutOfDomain", "PieceExplosion", "QflipError",
    "UnsupportedClauseCombination", "Interval", "to_rational", "Family", "Piece",
    "PiecewiseRecurrence", "e0_star", "eval_map", "make_builtin", "tau_power", "unwind",
    "validate", "OrbitReport", "eigenfunction_samples", "extend_unbounded",
    "forced_orbit_values", "forced_value", "orbit_trace", "preimages", "CertifiedValue",
    "Verdict", "compare_strategies", "discontinuity_gap", "find_discontinuity_in",
    "plot_series", "power_norm", "series_eval", "spectral_bound", "PwAffine", "pw_compose",
    "pw_leq", "Clause", "CrossBound", "LowerBound", "PropertySpec", "ShiftEquality", "Status",
    "UpperBound", "VerificationReport", "builtin_pipeline", "verify", "BitSource",
    "estimate_flips", "estimate_heads", "run_qflip",
]
