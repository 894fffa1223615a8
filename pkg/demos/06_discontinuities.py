"""Locating jumps of the E1 fixpoint.

The fixpoint jumps at the breakpoints of the map and at all their preimages,
so every subinterval contains a jump. The search finds one quickly.
"""
import random
from fractions import Fraction as F

from qflip import discontinuity_gap, find_discontinuity_in, make_builtin

p = F(1, 4)
e1 = make_builtin("E1", p)

for q0 in (F(1, 4), F(3, 4)):
    print(f"certified jump at {q0}: >= {float(discontinuity_gap(e1, q0, F(1, 64))):.4f}")

rng = random.Random(0)
for _ in range(5):
    a = F(rng.randint(0, 9000), 10000)
    b = a + F(rng.randint(1, 1000), 10000)
    w = find_discontinuity_in(e1, a, b)
    print(f"[{float(a):.4f}, {float(b):.4f}]: jump at {w.point} "
          f"(gap >= {float(w.gap):.3f}, {w.steps} steps back to breakpoint {w.breakpoint})")
