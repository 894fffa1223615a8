"""Proving orderings between fixpoints without computing them.

A property is a list of guarded bounds. If the bounds are satisfiable and
every recurrence maps the property into itself, the fixpoints satisfy it.
"""
from fractions import Fraction as F

from qflip import builtin_pipeline, verify

# %% E1 lies below the closed form of E0, for several biases
for p in (F(1, 10), F(1, 4), F(2, 5)):
    rep = verify(*builtin_pipeline("E1_le_E0", p))
    print(f"p={p}: {rep.status.value}, spectral check {rep.spectral_ok}")

# %% The pair property: E3 (with its tuned cut) below E1
p = F(1, 4)
spec, recs = builtin_pipeline("pair_E3_le_E1", p)
rep = verify(spec, recs)
print(recs[0].label, "vs", recs[1].label, "->", rep.status.value)
for clause in spec.clauses:
    print("  ", clause.label, clause.guard, ("E", "E'")[clause.subject], type(clause.form).__name__)

# %% The same property fails for E2, with a concrete witness
spec, recs = builtin_pipeline("pair_E3_le_E1", p, F(1, 2))
rep = verify(spec, recs)
w = rep.witness
print(recs[0].label, "->", rep.status.value)
print(f"  clause {w.clause} at q={w.q}: {w.lhs} > {w.rhs}")

# %% Some properties only close after unrolling two steps
spec, recs = builtin_pipeline("jump_bound", p)
for n in (1, 2):
    print(f"jump bound, n={n}:", verify(spec, recs, n=n).status.value)
