"""Hypothesis properties for the calculus, belief and solver layers."""

import warnings
from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_screening import Belief, Menu, TypeSpace, ValueFunction, solve, verify_constraints
from discrete_screening.beliefs import (
    belief_from_mills,
    is_log_concave,
    likelihood_ratio_monotone,
    mills_ratios,
    virtual_costs,
)
from discrete_screening.config import instance_from_dict, instance_to_dict, menu_from_json, menu_to_json
from discrete_screening.discrete_calc import (
    TabulatedFn,
    argmax_scan,
    backward_diff,
    ceil_rat,
    ceil_type_product,
    floor_rat,
    forward_diff,
    is_local_maximizer,
    maximize_concave,
    second_diff,
    second_diff_backward_of_forward,
    solve_foc,
)
from discrete_screening.solver import AssumptionWarning, monotonicity_report, reduced_objective

rationals = st.fractions(min_value=-60, max_value=60, max_denominator=24)
positive = st.fractions(min_value=F(1, 24), max_value=12, max_denominator=24)


@st.composite
def concave_tables(draw, max_b=16, increasing=False):
    b = draw(st.integers(1, max_b))
    drops = draw(st.lists(positive, min_size=b - 1, max_size=b - 1))
    first = sum(drops, F(0)) + draw(positive) if increasing else draw(rationals)
    diffs = [first]
    for d in drops:
        diffs.append(diffs[-1] - d)
    vals = [F(0) if increasing else draw(rationals)]
    for d in diffs:
        vals.append(vals[-1] + d)
    return TabulatedFn(tuple(vals))


@st.composite
def log_concave_beliefs(draw, max_m=6, m=None):
    m = m or draw(st.integers(1, max_m))
    ratios = sorted(draw(st.lists(positive, min_size=m - 1, max_size=m - 1)), reverse=True)
    w = [F(1)]
    for r in ratios:
        w.append(w[-1] * r)
    total = sum(w)
    return Belief(tuple(x / total for x in w))


class TestCalculus:
    @given(concave_tables())
    def test_maximizers(self, f):
        got = maximize_concave(f)
        assert got == argmax_scan(f)
        assert 1 <= len(got) <= 2
        if len(got) == 2:
            y, x = sorted(got)
            assert x == y + 1 and backward_diff(f, x) == 0 == forward_diff(f, y)
        assert {q for q in range(f.b + 1) if is_local_maximizer(f, q)} == got

    @given(concave_tables())
    def test_differences(self, f):
        for q in range(1, f.b):
            assert second_diff(f, q) == second_diff_backward_of_forward(f, q) < 0
            assert forward_diff(f, q) < backward_diff(f, q)
        for y in range(1, f.b):
            for x in range(y + 1, f.b + 1):
                assert backward_diff(f, x) < backward_diff(f, y)
                if x < f.b:
                    assert forward_diff(f, x) < forward_diff(f, y)

    @given(concave_tables(), positive)
    def test_foc_matches_shifted_argmax(self, f, c):
        assert solve_foc(f, c) == maximize_concave(f.minus_linear(c))

    @given(rationals, rationals, st.integers(-50, 50))
    def test_ceiling_floor_identities(self, x, y, n):
        assert x - 1 <= floor_rat(x) <= x <= ceil_rat(x) <= x + 1
        assert ceil_rat(x) == -floor_rat(-x)
        assert ceil_rat(x) + ceil_rat(y) - 1 <= ceil_rat(x + y) <= ceil_rat(x) + ceil_rat(y)
        assert floor_rat(x) + floor_rat(y) <= floor_rat(x + y) <= floor_rat(x) + floor_rat(y) + 1
        assert floor_rat(x + n) == floor_rat(x) + n
        assert ceil_rat(x + n) == ceil_rat(x) + n

    @given(st.integers(1, 8), st.integers(2, 300), st.data())
    def test_type_product(self, j, gamma, data):
        n = data.draw(st.integers(0, gamma - 1))
        assert ceil_type_product(j, gamma, n) == j * n


class TestBeliefs:
    @given(log_concave_beliefs())
    def test_monotone_ratios(self, p):
        assert is_log_concave(p) and likelihood_ratio_monotone(p)
        r = mills_ratios(p)
        assert all(a >= b for a, b in zip(r, r[1:]))
        phis = virtual_costs(p, TypeSpace(p.m, 101, 100))
        assert all(a > b for a, b in zip(phis, phis[1:]))

    @given(log_concave_beliefs())
    def test_mills_round_trip(self, p):
        assert belief_from_mills(mills_ratios(p)[:-1]) == p

    @given(st.lists(positive, max_size=5))
    def test_targets_round_trip(self, r):
        assert mills_ratios(belief_from_mills(r))[:-1] == tuple(r)


@st.composite
def instances(draw):
    v = ValueFunction(draw(concave_tables(max_b=24, increasing=True)))
    m = draw(st.integers(1, 4))
    gamma = draw(st.integers(v.b + 1, v.b + 60))
    T = TypeSpace(m, gamma, v.b, m * v.b)
    p = draw(log_concave_beliefs(m=m))
    return v, T, p


class TestSolver:
    @settings(max_examples=150, deadline=None)
    @given(instances())
    def test_emitted_assignments_are_feasible(self, inst):
        v, T, p = inst
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AssumptionWarning)
            sol = solve(v, T, p)
        assert monotonicity_report(sol.quantity_sets).weak
        for a in sol.assignments:
            assert verify_constraints(a, T).all_hold
            assert reduced_objective(v, T, p, a.quantities) == sol.expected_payoff
        assert sol.unique == (len(sol.assignments) == 1) == all(len(Q) == 1 for Q in sol.quantity_sets)


class TestSerialization:
    @given(instances())
    def test_instance_round_trip(self, inst):
        v, T, p = inst
        back = instance_from_dict(instance_to_dict(v, T, p))
        assert (back.v, back.T, back.p) == (v, T, p)

    @given(st.sets(st.tuples(st.integers(0, 60), st.integers(0, 200)), min_size=1, max_size=6))
    def test_menu_round_trip(self, pairs):
        M = Menu.of(*pairs)
        assert menu_from_json(menu_to_json(M)) == M
