"""Exact value of the E1 recurrence at q = 11/20 with p = 1/4.

The orbit of 11/20 under the E1 map falls onto the two-cycle {1/5, 4/5}
after two steps. On a cycle the recurrence is a finite linear system, so the
expected number of flips there is an exact rational number.
"""
from fractions import Fraction as F

from qflip import forced_orbit_values, forced_value, make_builtin, orbit_trace, series_eval

p = F(1, 4)
e1 = make_builtin("E1", p)
print(e1.label)
for piece in e1.pieces:
    print("  ", piece)

# %% Orbit of 11/20
rep = orbit_trace(e1, F(11, 20))
print("orbit:", " -> ".join(str(x) for x in rep.points))
print("classification:", rep.classification.value,
      "| cycle enters at step", rep.cycle_entry, "with length", rep.cycle_length)

# %% Forced values along the orbit
for q, v in forced_orbit_values(e1, F(11, 20)).items():
    print(f"E1*({q}) = {v}")

fv = forced_value(e1, F(11, 20))
print("golden value:", fv.value)

# %% The certified series agrees with the exact value
cv = series_eval(e1, F(11, 20), F(1, 10**12))
print(f"series enclosure: [{float(cv.lower):.15f}, {float(cv.upper):.15f}] after {cv.terms_used} terms")
assert fv.value in cv
