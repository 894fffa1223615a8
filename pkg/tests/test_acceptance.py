"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Every criterion is checked at its stated tolerance and runtime. The report
lines are printed in the terminal summary (see ``conftest.py``).
"""

import csv
import math
import random
import time
from fractions import Fraction as F


from qflip.cli import main as cli_main
from qflip.coinduct import builtin_pipeline, check_nonempty, conclude, e0_line, preservation_n
from qflip.montecarlo import estimate_both, estimate_flips
from qflip.orbit import eigenfunction_samples, forced_value, orbit_trace
from qflip.process import e0_star, eval_map, make_builtin, tau_apply, tau_power, unwind
from qflip.solve import discontinuity_gap, find_discontinuity_in, series_eval

P = F(1, 4)
RESULTS = []


def report(number, title, ok, detail):
    RESULTS.append(f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    assert ok, detail


def timed(fn, repeat=1):
    """(result of the last call, fastest wall time in seconds)."""
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def rand_unit(rng):
    d = rng.randint(1, 10**6)
    return F(rng.randint(0, d), d)


def test_01_golden_value():
    e1 = make_builtin("E1", P)
    fv, secs = timed(lambda: forced_value(e1, F(11, 20)), repeat=5)
    pts = orbit_trace(e1, F(11, 20)).points
    ok = fv.value == F(5, 2) and pts[2] == pts[4] == F(1, 5) and secs < 1e-3
    report(1, "exact golden value", ok,
           f"E1*(11/20) = {fv.value}, f^2 = {pts[2]}, f^4 = {pts[4]}, {secs * 1e3:.3f} ms")


def test_02_closed_forms():
    rng = random.Random(2)
    eps = F(1, 10**9)
    bad = []

    def run():
        for p in (F(1, 10), F(1, 4), F(2, 5)):
            h0, e0, line = make_builtin("H0", p), make_builtin("E0", p), e0_star(p)
            for _ in range(200):
                q = rand_unit(rng)
                if q not in series_eval(h0, q, eps):
                    bad.append(("H0", p, q))
                if line(q) not in series_eval(e0, q, eps):
                    bad.append(("E0", p, q))

    _, secs = timed(run)
    report(2, "closed-form fixpoints", not bad and secs < 1,
           f"{len(bad)} misses over 1200 enclosures, {secs:.3f} s")


def test_03_inversion():
    e2 = make_builtin("E2", P)
    cv, secs = timed(lambda: series_eval(e2, F(11, 20), F(1, 10**9)))
    gap = cv.lower - F(5, 2)
    ok = cv.lower > F(323, 128) and gap >= F(3, 128) and secs < 0.1
    report(3, "inversion at 11/20", ok,
           f"E2*(11/20) >= {float(cv.lower):.9f} > 323/128, gap over 5/2 >= {float(gap):.6f}, {secs * 1e3:.1f} ms")


def test_04_pipeline_a():
    lines, ok = [], True
    for p in (F(1, 10), F(1, 4), F(2, 5)):
        spec, recs = builtin_pipeline("E1_le_E0", p)
        rep, secs = timed(lambda: conclude(spec, recs, check_nonempty(spec), preservation_n(spec, recs, 1)))
        ok &= rep.verified and rep.spectral_ok and secs < 0.1
        lines.append(f"p={p}: {rep.status.value} ({secs * 1e3:.1f} ms)")
    report(4, "coinduction E1 <= E0", ok, ", ".join(lines))


def _ih1_obligation(rec_first, rec_second, q):
    """Independent re-derivation of the IH1 chain at q for the pair spec."""
    f1, r1, a1, _ = eval_map(rec_first, q)
    f2, r2, a2, _ = eval_map(rec_second, q)
    upper = e0_line(P)(f1)                       # E(x) <= E'(x) <= E0 line (IH1, IH4)
    lower = 2 if P < f2 < 1 - P else F(4, 3)     # IH3 inside (p, 1-p), else the E' floor
    return a1 + r1 * upper, a2 + r2 * lower


def test_05_pipeline_b():
    def run():
        spec, recs = builtin_pipeline("pair_E3_le_E1", P)
        good = conclude(spec, recs, check_nonempty(spec), preservation_n(spec, recs, 1))
        spec2, recs2 = builtin_pipeline("pair_E3_le_E1", P, F(1, 2))
        bad = conclude(spec2, recs2, check_nonempty(spec2), preservation_n(spec2, recs2, 1))
        return recs, good, recs2, bad

    (recs, good, recs2, bad), secs = timed(run)
    w = bad.witness
    lhs, rhs = _ih1_obligation(recs2[0], recs2[1], w.q)
    reeval_false = w.clause == "IH1" and (lhs, rhs) == (w.lhs, w.rhs) and lhs > rhs
    ok = (good.verified and "c=9/16" in recs[0].label and bad.status.value == "Violation"
          and reeval_false and secs < 1)
    report(5, "coinduction pair IH1-IH5", ok,
           f"E3(c=9/16): {good.status.value}; E2: {bad.status.value} at {w.clause} q={w.q} "
           f"({w.lhs} > {w.rhs}), {secs * 1e3:.0f} ms")


def test_06_discontinuities():
    e1 = make_builtin("E1", P)
    rng = random.Random(6)
    failures = []

    def run():
        gaps = [discontinuity_gap(e1, q0, F(1, 64)) for q0 in (F(3, 4), F(1, 4))]
        for _ in range(50):
            width = F(rng.randint(10**3, 5 * 10**5), 10**6)
            a = rand_unit(rng) * (1 - width)
            w = find_discontinuity_in(e1, a, a + width)
            limit = math.ceil(math.log(width) / math.log(F(3, 4))) + 1
            if not (a < w.point < a + width and w.gap > 0 and w.steps <= limit):
                failures.append((a, width, w))
        return gaps

    gaps, secs = timed(run)
    ok = all(g >= F(1, 2) for g in gaps) and not failures and secs < 2
    report(6, "discontinuity bounds", ok,
           f"gaps {float(gaps[0]):.4f} at 3/4 and {float(gaps[1]):.4f} at 1/4, "
           f"{50 - len(failures)}/50 intervals within the step bound, {secs:.3f} s")


def test_07_spectral_attainment():
    # Taken literally: every sample, the root (1, 1) included, must satisfy the identity.
    e1 = make_builtin("E1", P)
    samples, secs = timed(lambda: eigenfunction_samples(e1, 8))
    table = dict(samples)
    failing = [q for q, e in samples if eval_map(e1, q).r_q * table[eval_map(e1, q).f_q] != (1 - P) * e]
    ok = len(samples) >= 50 and not failing and secs < 0.1
    report(7, "spectral attainment", ok,
           f"{len(samples)} samples, identity fails at {[str(q) for q in failing]} "
           f"(r(1)E(1) = {eval_map(e1, 1).r_q} vs (1-p)E(1) = {1 - P}), {secs * 1e3:.1f} ms")


def test_08_monte_carlo():
    lines, ok = [], True
    t0 = time.perf_counter()
    for seed in (1, 2, 3):
        heads, flips = estimate_both(1, P, F(11, 20), 100_000, seed)
        flips0 = estimate_flips(0, P, F(1, 2), 100_000, seed)
        checks = [abs(heads.mean - 11 / 20) <= 4 * heads.stderr,
                  abs(flips.mean - 2.5) <= 4 * flips.stderr,
                  abs(flips0.mean - 8 / 3) <= 4 * flips0.stderr,
                  flips.mean <= 4 + 4 * flips.stderr,
                  flips0.mean <= 4 + 4 * flips0.stderr]
        ok &= all(checks)
        lines.append(f"seed {seed}: H={heads.mean:.4f} E1={flips.mean:.4f} E0={flips0.mean:.4f}")
    secs = time.perf_counter() - t0
    ok &= secs < 30
    report(8, "Monte Carlo concordance", ok, "; ".join(lines) + f", {secs:.1f} s")


def test_09_figures(tmp_path):
    t0 = time.perf_counter()
    eps = F(1, 10**6)
    tables = {}
    for fam in ("E1", "E2"):
        out = tmp_path / f"{fam}.csv"
        code = cli_main(["plot", "--family", fam, "--p", "1/4", "--points", "2048",
                         "--eps", "1e-6", "--out", str(out)])
        assert code == 0
        tables[fam] = {F(r["q"]): (F(r["lower"]), F(r["upper"])) for r in csv.DictReader(out.open())}
    secs = time.perf_counter() - t0
    in_range = all(F(4, 3) <= lo and hi <= 4 for t in tables.values() for lo, hi in t.values())
    line = e0_star(P)
    below = all(hi <= line(q) + 2 * eps for q, (lo, hi) in tables["E1"].items())
    e2 = tables["E2"]
    symmetric = all(e2[q][0] <= e2[1 - q][1] + 2 * eps and e2[1 - q][0] <= e2[q][1] + 2 * eps for q in e2)
    ok = in_range and below and symmetric and len(e2) == 2048 and secs < 60
    report(9, "figure properties", ok,
           f"within [4/3, 4]: {in_range}, E1 below E0 line: {below}, E2 symmetric: {symmetric}, {secs:.1f} s")


def test_10_unwind_coherence():
    rng = random.Random(10)
    mismatches = []

    def run():
        for fam in ("H0", "E0", "E1", "E2", "E3"):
            rec = make_builtin(fam, P)
            for n in (1, 2, 3):
                u = unwind(rec, n)
                for _ in range(100):
                    q = rand_unit(rng)
                    k = rand_unit(rng)
                    g = lambda y, k=k: k * y * y - y + 3
                    if tau_apply(u, g, q) != tau_power(rec, g, q, n):
                        mismatches.append((fam, n, q))

    _, secs = timed(run)
    report(10, "unwind coherence", not mismatches and secs < 5,
           f"{len(mismatches)} mismatches over 1500 checks, {secs:.3f} s")
