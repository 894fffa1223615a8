"""Certified curves of the bounded fixpoints of E0, E1 and E2.

Writes one CSV per family with columns q, lower, upper. If matplotlib is
installed the curves are also drawn to fixpoints.png.

    python3 demos/02_fixpoint_curves.py [outdir]
"""
import csv
import sys
from fractions import Fraction as F
from pathlib import Path

import numpy as np

from qflip import e0_star, make_builtin, plot_series

p = F(1, 4)
outdir = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
outdir.mkdir(parents=True, exist_ok=True)
eps = F(1, 10**6)

curves = {}
for fam in ("E0", "E1", "E2"):
    rows = plot_series(make_builtin(fam, p), 512, eps)
    with open(outdir / f"{fam}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "lower", "upper"])
        w.writerows((str(q), str(lo), str(hi)) for q, lo, hi in rows)
    curves[fam] = np.array([[float(q), float(lo), float(hi)] for q, lo, hi in rows])
    print(f"{fam}: {len(rows)} points, values in [{curves[fam][:, 1].min():.4f}, {curves[fam][:, 2].max():.4f}]")

# %% E1 never exceeds the E0 line and E2 is symmetric about 1/2
line = e0_star(p)
print("E1 below E0 line:", all(hi <= float(line(F(q).limit_denominator(10**6))) + 1e-6
                               for q, _, hi in curves["E1"]))
e2 = curves["E2"][:, 1]
print("E2 max asymmetry:", float(np.max(np.abs(e2 - e2[::-1]))))

# %% Optional figure
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; CSV files only")
else:
    fig, ax = plt.subplots(figsize=(7, 4))
    for fam, arr in curves.items():
        ax.plot(arr[:, 0], arr[:, 1], lw=0.7, label=fam)
    ax.set_xlabel("q")
    ax.set_ylabel("expected flips")
    ax.legend()
    fig.savefig(outdir / "fixpoints.png", dpi=150)
    print("wrote", outdir / "fixpoints.png")
