from fractions import Fraction as F

import pytest

from discrete_screening.discrete_calc import (
    TabulatedFn,
    argmax_scan,
    backward_diff,
    ceil_rat,
    ceil_type_product,
    check_concavity,
    floor_rat,
    foc_holds,
    forward_diff,
    is_local_maximizer,
    maximize_concave,
    second_diff,
    second_diff_backward_of_forward,
    solve_foc,
)
from discrete_screening.exceptions import DomainError, PreconditionError


def quad(a, c, b):
    a, c = F(a), F(c)
    return TabulatedFn.from_callable(lambda q: a * q + c * q * q, b)


EX1 = quad(50, F(-1, 2), 100)
EX3 = quad(253, F(-5, 2), 100)
# the two-maximizer table on {0..4}: strictly concave, maximizers {2, 3}
TWO_PEAKS = TabulatedFn((F(-2), F(0), F(1), F(1), F(0)))


class TestDifferences:
    def test_forward(self):
        assert forward_diff(EX1, 10) == F(79, 2)
        assert forward_diff(EX3, 50) == F(1, 2)
        assert forward_diff(TabulatedFn((F(7),) * 5), 2) == 0

    def test_backward(self):
        assert backward_diff(EX1, 10) == F(81, 2)
        assert backward_diff(EX3, 50) == F(11, 2)
        assert backward_diff(TabulatedFn((F(7),) * 5), 3) == 0

    def test_backward_is_shifted_forward(self):
        assert all(backward_diff(EX1, q) == forward_diff(EX1, q - 1) for q in range(1, 101))

    def test_second(self):
        assert {second_diff(EX1, q) for q in range(1, 100)} == {-1}
        assert {second_diff(EX3, q) for q in range(1, 100)} == {-5}
        assert {second_diff(quad(3, 0, 8), q) for q in range(1, 8)} == {0}

    def test_second_orders_commute(self):
        assert all(second_diff(EX3, q) == second_diff_backward_of_forward(EX3, q) for q in range(1, 100))

    @pytest.mark.parametrize("fn,q", [(forward_diff, 100), (forward_diff, -1), (backward_diff, 0), (second_diff, 0),
                                      (second_diff, 100)])
    def test_out_of_range(self, fn, q):
        with pytest.raises(DomainError):
            fn(EX1, q)

    def test_floats_refused(self):
        with pytest.raises(DomainError):
            TabulatedFn((0.0, 1.5))


class TestConcavityReport:
    def test_example1_increasing_part(self):
        rep = check_concavity(quad(50, F(-1, 2), 50))
        assert rep.all_hold

    def test_example1_full_grid_is_not_increasing(self):
        rep = check_concavity(EX1)
        assert not rep.increasing
        assert rep.strictly_concave and rep.bounded_concavity and rep.no_integer_forward_diff

    def test_example3(self):
        rep = check_concavity(EX3)
        assert rep.strictly_concave and not rep.bounded_concavity and rep.no_integer_forward_diff
        assert not rep.increasing  # fwd(q) = 250.5 - 5q turns negative after q = 50
        assert check_concavity(quad(253, F(-5, 2), 51)).increasing

    def test_two_peaks(self):
        rep = check_concavity(TWO_PEAKS)
        assert rep.strictly_concave and not rep.increasing
        assert rep.failures() == ["zero_at_origin", "increasing", "no_integer_forward_diff"]


class TestMaximize:
    def test_two_peaks(self):
        assert maximize_concave(TWO_PEAKS) == {2, 3}
        assert [is_local_maximizer(TWO_PEAKS, q) for q in range(5)] == [False, False, True, True, False]

    def test_decreasing(self):
        assert maximize_concave(quad(-1, F(-1, 2), 6)) == {0}

    def test_example2_tie(self):
        assert maximize_concave(EX1.minus_linear(F(5, 2))) == {47, 48}

    def test_requires_strict_concavity(self):
        with pytest.raises(PreconditionError):
            maximize_concave(quad(1, 0, 4))

    def test_matches_scan(self):
        assert maximize_concave(EX3) == argmax_scan(EX3) == {51}


class TestSolveFoc:
    @pytest.mark.parametrize("f,c,expected", [(EX1, 1, {49}), (EX1, F(5, 2), {47, 48}), (EX1, 3, {47}),
                                              (EX1, 5, {45}), (EX3, 5, {50}), (EX3, 1, {50})])
    def test_examples(self, f, c, expected):
        assert solve_foc(f, c) == expected

    def test_boundaries_one_sided(self):
        f = quad(5, F(-1, 4), 3)  # forward differences 4.75, 4.25, 3.75
        assert solve_foc(f, 1) == {3}
        assert solve_foc(f, 6) == {0}
        assert foc_holds(f, 3, 1) and not foc_holds(f, 2, 1)

    def test_positive_cost_required(self):
        with pytest.raises(DomainError):
            solve_foc(EX1, 0)


class TestRounding:
    def test_ceil_floor(self):
        assert ceil_rat(F(299, 100)) == 3
        assert ceil_rat(F(5, 2) * 2) == 5 < ceil_rat(F(5, 2)) * 2
        assert floor_rat(F(-1, 2)) == -1 and ceil_rat(F(-1, 2)) == 0

    @pytest.mark.parametrize("j,gamma,n,expected", [(2, 100, 47, 94), (1, 100, 0, 0), (3, 100, 45, 135)])
    def test_type_product(self, j, gamma, n, expected):
        assert ceil_type_product(j, gamma, n) == expected
        assert ceil_rat((j - F(1, gamma)) * n) == expected

    def test_type_product_needs_small_n(self):
        assert ceil_rat((2 - F(1, 10)) * 10) == 19  # the identity fails at n = gamma
        with pytest.raises(PreconditionError):
            ceil_type_product(2, 10, 10)
