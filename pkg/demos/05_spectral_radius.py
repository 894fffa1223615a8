"""How fast the series converges: norms of powers of the weight operator.

The operator E -> r E(f) has norm equal to the largest weight. Its n-th
power can be smaller because no orbit can keep picking the heaviest piece.
"""
from fractions import Fraction as F

from qflip import eigenfunction_samples, eval_map, make_builtin, power_norm, spectral_bound

p = F(1, 4)
e1 = make_builtin("E1", p)
print("norm bound:", spectral_bound(e1))
for n in range(1, 8):
    pn = power_norm(e1, n)
    print(f"n={n}: ||T^n|| = {pn}, n-th root = {float(pn) ** (1 / n):.4f}")

# %% Samples of a candidate eigenfunction on the backward tree of 1
samples = eigenfunction_samples(e1, 6)
table = dict(samples)
off = [x for x, v in samples if eval_map(e1, x).r_q * table[eval_map(e1, x).f_q] != (1 - p) * v]
print(len(samples), "samples; eigen identity fails at", [str(x) for x in off])
