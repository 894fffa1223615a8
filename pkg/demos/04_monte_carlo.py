"""Simulating the coin process with exact Bernoulli draws.

Each trial draws fair bits from a counter-based generator and uses them to
flip a p-coin exactly, so the only error is sampling error.
"""
from fractions import Fraction as F

from qflip import forced_value, make_builtin
from qflip.montecarlo import estimate_both

p = F(1, 4)
q = F(11, 20)
exact = forced_value(make_builtin("E1", p), q).value

for seed in (1, 2, 3):
    heads, flips = estimate_both(1, p, q, 50_000, seed)
    print(f"seed {seed}: P(heads) = {heads.mean:.4f} +/- {heads.stderr:.4f} (target {float(q)}), "
          f"flips = {flips.mean:.4f} +/- {flips.stderr:.4f} (exact {exact})")

# %% Parallel workers split the trials into independent streams, same answer
a = estimate_both(2, p, q, 20_000, seed=7, workers=1)
b = estimate_both(2, p, q, 20_000, seed=7, workers=2)
print("worker count changes result:", a != b)
