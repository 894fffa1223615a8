from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import P_VALUES, biases, unit_rationals
from oracles import ref_step
from qflip.errors import InvalidBias, InvalidBreakpoint, InvalidRecurrence, OutOfDomain, PieceExplosion
from qflip.intervals import Interval
from qflip.process import (Piece, PiecewiseRecurrence, e0_star, eval_map, make_builtin,
                           tau_apply, tau_power, unwind, validate)

FAMILIES = ["H0", "E0", "E1", "E2", "E3"]


def families_for(p):
    return [f for f in FAMILIES if f != "E3" or p <= (1 - p) ** 2]


class TestBuiltins:
    def test_e1_quarter(self):
        rec = make_builtin("E1", F(1, 4))
        assert len(rec.pieces) == 3
        assert rec.breakpoints() == [F(1, 4), F(3, 4)]
        assert [pc.r for pc in rec.pieces] == [F(1, 4), F(3, 4), F(1, 4)]

    def test_piece_counts(self):
        p = F(1, 4)
        counts = {f: len(make_builtin(f, p).pieces) for f in FAMILIES}
        assert counts == {"H0": 2, "E0": 2, "E1": 3, "E2": 4, "E3": 4}

    def test_e3_default_breakpoint(self):
        rec = make_builtin("E3", F(1, 4))
        assert F(9, 16) in rec.breakpoints()

    def test_e3_rejects_large_p(self):
        with pytest.raises(InvalidBreakpoint):
            make_builtin("E3", F(2, 5))

    def test_e3_rejects_c_out_of_range(self):
        with pytest.raises(InvalidBreakpoint):
            make_builtin("E3", F(1, 4), F(1, 2))
        top = make_builtin("E3", F(1, 4), F(3, 4))  # c = 1 - p is the top of the range
        assert eval_map(top, F(3, 4)).f_q == 0  # 1 - p stays with the high branch

    @pytest.mark.parametrize("p", [F(0), F(-1, 3), F(3, 5), F(1)])
    def test_bias_range(self, p):
        with pytest.raises(InvalidBias):
            make_builtin("E1", p)

    def test_e2_ignores_c(self):
        assert make_builtin("E2", F(1, 4), F(2, 3)).breakpoints() == make_builtin("E2", F(1, 4)).breakpoints()

    @pytest.mark.parametrize("family", ["E1", "E2"])
    def test_half_drops_empty_middle(self, family):
        rec = make_builtin(family, F(1, 2))
        assert validate(rec) == []
        assert eval_map(rec, F(1, 2)).f_q == 0  # the q >= 1 - p branch owns 1/2

    @given(p=biases(), q=unit_rationals())
    def test_map_matches_procedure(self, p, q):
        for fam in families_for(p):
            f_q, r_q, a_q, _ = eval_map(make_builtin(fam, p), q)
            assert (f_q, r_q, a_q) == ref_step(fam, p, q)


class TestEvalMap:
    def test_examples(self):
        rec = make_builtin("E1", F(1, 4))
        assert eval_map(rec, F(11, 20))[:3] == (F(2, 5), F(3, 4), 1)
        assert eval_map(rec, 0)[:2] == (0, F(1, 4))
        assert eval_map(rec, 1)[:2] == (1, F(1, 4))

    @pytest.mark.parametrize("q", [F(-1, 10), F(11, 10)])
    def test_out_of_domain(self, q):
        with pytest.raises(OutOfDomain):
            eval_map(make_builtin("E1", F(1, 4)), q)

    @given(p=biases(), q=unit_rationals())
    def test_partition_and_range(self, p, q):
        for fam in families_for(p):
            rec = make_builtin(fam, p)
            owners = [pc for pc in rec.pieces if pc.contains(q)]
            assert len(owners) == 1
            assert 0 <= eval_map(rec, q).f_q <= 1


class TestValidate:
    def test_builtins_valid(self):
        for p in P_VALUES:
            for fam in families_for(p):
                assert validate(make_builtin(fam, p)) == []

    def test_overlap(self):
        left = Piece.on(Interval.closed(0, F(1, 2)), 2, 0, F(1, 2), 1)
        right = Piece.on(Interval.closed(F(1, 2), 1), 2, -1, F(1, 2), 1)
        problems = validate(PiecewiseRecurrence((left, right), F(1, 2)))
        assert any("overlap at q=1/2" in s for s in problems)

    def test_image_escape(self):
        bad = Piece.on(Interval.closed(0, F(1, 4)), 8, 0, F(1, 2), 1)
        rest = Piece.on(Interval(F(1, 4), 1, False, True), 1, 0, F(1, 2), 1)
        problems = validate(PiecewiseRecurrence((bad, rest), F(1, 4)))
        assert any("escapes" in s for s in problems)

    def test_gap_and_weight(self):
        only = Piece.on(Interval.closed(0, F(1, 2)), 1, 0, 1, 1)
        problems = validate(PiecewiseRecurrence((only,), F(1, 4)))
        assert any("gap" in s for s in problems)
        assert any("weight" in s for s in problems)

    def test_open_seam_is_gap(self):
        left = Piece.on(Interval(0, F(1, 2), True, False), 1, 0, F(1, 2), 1)
        right = Piece.on(Interval(F(1, 2), 1, False, True), 1, 0, F(1, 2), 1)
        assert any("gap" in s for s in validate(PiecewiseRecurrence((left, right), F(1, 4))))


class TestTau:
    def test_examples(self):
        p = F(1, 4)
        assert tau_apply(make_builtin("E1", p), lambda y: 0, F(1, 2)) == 1
        assert tau_apply(make_builtin("E0", p), e0_star(p), F(1, 2)) == F(8, 3)
        assert tau_apply(make_builtin("H0", p), lambda y: y, F(1, 2)) == F(1, 2)

    @given(p=biases(), q=unit_rationals())
    def test_fixpoint_substitution(self, p, q):
        assert tau_apply(make_builtin("E0", p), e0_star(p), q) == e0_star(p)(q)
        assert tau_apply(make_builtin("H0", p), lambda y: y, q) == q

    def test_unwind_one_is_identity(self):
        rec = make_builtin("E1", F(1, 4))
        one = unwind(rec, 1)
        assert [(pc.interval, pc.f_slope, pc.f_intercept, pc.r, pc.a) for pc in one.pieces] == \
               [(pc.interval, pc.f_slope, pc.f_intercept, pc.r, pc.a) for pc in rec.pieces]

    def test_unwind_two_discont_points(self):
        p = F(1, 4)
        u2 = unwind(make_builtin("E1", p), 2)
        right = eval_map(u2, 1 - p + F(1, 64))
        assert (right.a_q, right.r_q, right.f_q) == (F(5, 4), F(1, 16), F(1, 4))
        left = eval_map(u2, p - F(1, 64))
        assert (left.a_q, left.r_q, left.f_q) == (F(5, 4), F(1, 16), F(3, 4))

    @given(p=biases(), n=st.integers(1, 6), q=unit_rationals(),
           k=st.integers(-3, 3), m=st.integers(-3, 3))
    def test_unwind_semantics(self, p, n, q, k, m):
        g = lambda y: k * y * y + m * y + 1  # any oracle, here a quadratic
        for fam in families_for(p):
            rec = make_builtin(fam, p)
            assert validate(unwind(rec, n)) == []
            assert tau_apply(unwind(rec, n), g, q) == tau_power(rec, g, q, n)

    def test_piece_limit(self, monkeypatch):
        monkeypatch.setenv("QFLIP_PIECE_LIMIT", "20")
        with pytest.raises(PieceExplosion):
            unwind(make_builtin("E2", F(1, 4)), 4)

    @given(p=biases(), n=st.integers(1, 4), data=st.data())
    def test_contraction_on_orbit_closed_sets(self, p, n, data):
        rec = make_builtin("E1", p)
        seeds = data.draw(st.lists(unit_rationals(200), min_size=1, max_size=5))
        S = set(seeds)
        closure = set(S)
        frontier = set(S)
        for _ in range(n):
            frontier = {eval_map(rec, x).f_q for x in frontier}
            closure |= frontier
        vals_u = {x: data.draw(st.fractions(-5, 5, max_denominator=50)) for x in closure}
        vals_v = {x: data.draw(st.fractions(-5, 5, max_denominator=50)) for x in closure}
        lhs = max(abs(tau_power(rec, vals_u.__getitem__, x, n) - tau_power(rec, vals_v.__getitem__, x, n))
                  for x in S)
        rhs = rec.c_max ** n * max(abs(vals_u[x] - vals_v[x]) for x in closure)
        assert lhs <= rhs


def test_invalid_recurrence_error_lists_problems():
    from qflip.process import ensure_valid
    bad = Piece.on(Interval.closed(0, 1), 2, 0, F(1, 2), 1)
    with pytest.raises(InvalidRecurrence) as exc:
        ensure_valid(PiecewiseRecurrence((bad,), F(1, 4)))
    assert exc.value.violations
