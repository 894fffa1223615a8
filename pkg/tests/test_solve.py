import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import biases, unit_rationals
from oracles import ref_forced, ref_partial
from qflip.errors import NotFound, OutOfDomain
from qflip.montecarlo import estimate_flips
from qflip.orbit import forced_value, orbit_trace
from qflip.process import make_builtin, with_pieces
from qflip.solve import (Verdict, compare_strategies, discontinuity_gap, find_discontinuity_in,
                         partial_sum, plot_grid, plot_series, power_norm, series_eval,
                         spectral_bound, step_bound)

P = F(1, 4)
E0, E1, E2 = (make_builtin(f, P) for f in ("E0", "E1", "E2"))
EPS = F(1, 10**9)


class TestSeriesEval:
    def test_examples(self):
        assert F(8, 3) in series_eval(E0, F(1, 2), EPS)
        assert F(1, 2) in series_eval(make_builtin("H0", P), F(1, 2), EPS)
        assert series_eval(E2, F(11, 20), EPS).lower > F(323, 128)

    def test_width(self):
        cv = series_eval(E1, F(1, 3), EPS)
        assert cv.lower <= cv.upper and cv.width <= EPS

    def test_detect_cycles_exact(self):
        cv = series_eval(E1, F(11, 20), EPS, detect_cycles=True)
        assert cv.lower == cv.upper == F(5, 2)

    def test_bad_inputs(self):
        with pytest.raises(OutOfDomain):
            series_eval(E1, F(2), EPS)
        with pytest.raises(ValueError):
            series_eval(E1, F(1, 2), 0)

    def test_partial_sum_is_lower_for_nonnegative_tail(self):
        # H0 has inf a = 0 so its lower bound is exactly the partial sum
        h0 = make_builtin("H0", P)
        cv = series_eval(h0, F(3, 7), F(1, 10**6))
        assert cv.lower == partial_sum(h0, F(3, 7), cv.terms_used)

    @given(p=biases(), q=unit_rationals(), fam=st.sampled_from(["E1", "E2", "H0"]), n=st.integers(0, 30))
    def test_partial_sum_oracle(self, p, q, fam, n):
        assert partial_sum(make_builtin(fam, p), q, n) == ref_partial(fam, p, q, n)

    @given(q=st.fractions(0, 1, max_denominator=40), fam=st.sampled_from(["E0", "E1", "E2"]))
    def test_monotone_and_sound_against_forced(self, q, fam):
        rec = make_builtin(fam, P)
        if not orbit_trace(rec, q, 300).has_cycle:
            return
        exact = forced_value(rec, q, 300).value
        assert exact == ref_forced(fam, P, q)
        prev = None
        for n in range(0, 40, 3):
            cv = series_eval(rec, q, F(1, 10**30), max_terms=n)
            assert cv.lower <= exact <= cv.upper
            assert abs(cv.lower - exact) <= cv.upper - cv.lower
            if prev is not None:
                assert prev.lower <= cv.lower and cv.upper <= prev.upper
            prev = cv

    @given(p=biases(), q=unit_rationals(), fam=st.sampled_from(["E0", "E1", "E2", "E3"]))
    def test_global_bounds(self, p, q, fam):
        if fam == "E3" and p > (1 - p) ** 2:
            return
        rec = make_builtin(fam, p)
        cv = series_eval(rec, q, F(1, 10**6))
        assert 1 <= cv.lower and cv.upper <= rec.sup_a / (1 - rec.c_max) <= 1 / p

    @given(q=unit_rationals())
    def test_e2_lower_geometric(self, q):
        cv = series_eval(E2, q, F(1, 10**6))
        assert cv.lower >= sum(P ** n for n in range(cv.terms_used))


class TestSpectral:
    def test_examples(self):
        assert spectral_bound(E1) == F(3, 4)
        assert spectral_bound(make_builtin("H0", P)) == F(3, 4)
        flat = with_pieces(E1, r=P)
        assert spectral_bound(flat) == P

    def test_power_norm_drops_below_one_minus_p(self):
        # the first four powers keep norm (1-p)^n, the fifth does not
        assert [power_norm(E1, n) for n in range(1, 5)] == [F(3, 4) ** n for n in range(1, 5)]
        assert power_norm(E1, 5) == F(81, 1024)
        assert power_norm(E1, 5) < F(3, 4) ** 5
        assert float(power_norm(E1, 5)) ** (1 / 5) < 0.61


class TestCompare:
    def test_inversion(self):
        (row,) = compare_strategies(E1, E2, [F(11, 20)], EPS)
        assert row.verdict is Verdict.A_BELOW_B
        assert row.b_value.lower - row.a_value.upper >= F(3, 128) - EPS

    def test_e1_below_e0_never_reversed(self):
        rows = compare_strategies(E1, E0, plot_grid(E1, 65), F(1, 10**6))
        assert all(r.verdict is not Verdict.B_BELOW_A for r in rows)
        assert any(r.verdict is Verdict.A_BELOW_B for r in rows)

    def test_self_comparison_undetermined(self):
        rows = compare_strategies(E1, E1, [F(1, 3), F(11, 20), F(9, 10)], EPS)
        assert all(r.verdict is Verdict.UNDETERMINED for r in rows)

    def test_eps_floor_terminates(self):
        rows = compare_strategies(E1, E1, [F(1, 3)], F(1, 10**3), eps_floor=F(1, 10**9))
        assert rows[0].verdict is Verdict.UNDETERMINED
        assert rows[0].a_value.width <= F(1, 10**9)

    def test_monte_carlo_respects_certified_order(self):
        (row,) = compare_strategies(E1, E2, [F(11, 20)], EPS)
        assert row.verdict is Verdict.A_BELOW_B
        a = estimate_flips(1, P, F(11, 20), 40_000, seed=11)
        b = estimate_flips(2, P, F(11, 20), 40_000, seed=12)
        assert a.mean <= b.mean + 4 * math.hypot(a.stderr, b.stderr)


class TestDiscontinuity:
    @pytest.mark.parametrize("q0", [F(3, 4), F(1, 4)])
    def test_known_jumps(self, q0):
        assert discontinuity_gap(E1, q0, F(1, 64)) >= F(1, 2)

    def test_continuous_e0(self):
        # the separation never exceeds the variation of the line E0* over the window
        for q0 in (F(1, 4), F(1, 2), F(3, 4)):
            for side in (F(1, 64), F(1, 10**6), F(1, 10**10)):
                assert discontinuity_gap(E0, q0, side) <= F(8, 3) * 2 * side
        assert discontinuity_gap(E0, F(1, 4), F(1, 10**13)) == 0

    def test_e1_jump_persists_at_small_scale(self):
        assert discontinuity_gap(E1, F(3, 4), F(1, 10**10)) >= F(1, 2)

    def test_side_eps_guard(self):
        with pytest.raises(ValueError):
            discontinuity_gap(E1, F(3, 4), F(1, 16))

    def test_small_interval(self):
        w = find_discontinuity_in(E1, F(3, 10), F(32, 100))
        assert F(3, 10) < w.point < F(32, 100) and w.gap > 0
        assert discontinuity_gap(E1, w.point, F(1, 10**6)) > 0
        assert w.steps <= step_bound(F(2, 100), P) + 1

    def test_straddling_interval(self):
        w = find_discontinuity_in(E1, F(7, 10), F(8, 10))
        assert w.point == F(3, 4) and w.steps == 0

    def test_not_found(self):
        with pytest.raises(NotFound):
            find_discontinuity_in(E0, F(1, 3), F(1, 2), budget=5)
        with pytest.raises(NotFound):
            find_discontinuity_in(E0, F(1, 5), F(3, 10), budget=40)

    def test_step_bound(self):
        assert step_bound(F(1, 1000), P) == math.ceil(math.log(1e-3) / math.log(0.75))


class TestPlot:
    def test_e0_three_points(self):
        rows = plot_series(E0, 3, F(1, 10**6))
        for (q, lo, hi), v in zip(rows, (F(4, 3), F(8, 3), F(4))):
            assert lo <= v <= hi

    def test_refined_grid_contains_breakpoint_preimages(self):
        grid = plot_grid(E1, 5, refine=True)
        assert F(3, 4) in grid and F(3, 16) in grid  # 3/16 -> 3/4 under q/p
        assert grid == sorted(set(grid))

    def test_points_guard(self):
        with pytest.raises(ValueError):
            plot_grid(E1, 1)
