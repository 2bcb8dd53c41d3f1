from fractions import Fraction as F

import pytest

from discrete_screening import Belief, TypeSpace
from discrete_screening.beliefs import (
    belief_from_mills,
    belief_grid,
    compositions,
    grid_neighbours,
    grid_size,
    is_log_concave,
    is_strictly_log_concave,
    likelihood_ratio_monotone,
    log_concavity_from_mills,
    mills_ratio,
    mills_ratios,
    perturb,
    virtual_costs,
)
from discrete_screening.exceptions import DomainError

T3 = TypeSpace(3, 100, 50)
BIMODAL = Belief.from_strings(["9/20", "1/10", "9/20"])


def test_validation():
    with pytest.raises(DomainError):
        Belief((F(1, 2), F(1, 3)))
    with pytest.raises(DomainError):
        Belief((F(1), F(0)))
    with pytest.raises(DomainError):
        Belief((0.5, 0.5))


def test_log_concavity(uniform3, p_ex2):
    assert is_log_concave(uniform3) and not is_strictly_log_concave(uniform3)
    assert is_log_concave(p_ex2)
    assert not is_log_concave(BIMODAL)
    assert is_log_concave(Belief.from_strings(["1/10", "9/10"]))


def test_mills(uniform3, p_ex2):
    assert mills_ratio(uniform3, 1) == 2
    assert mills_ratio(p_ex2, 2) == F(1, 2)
    assert mills_ratio(p_ex2, 3) == 0
    assert mills_ratios(p_ex2) == (3, F(1, 2), 0)


def test_virtual_costs(uniform3, p_ex2):
    assert virtual_costs(uniform3, T3) == (5, 3, 1)
    assert virtual_costs(p_ex2, T3) == (6, F(5, 2), 1)
    with pytest.raises(DomainError):
        virtual_costs(Belief.uniform(2), T3)


def test_likelihood_ratios(p_ex2):
    assert likelihood_ratio_monotone(p_ex2)
    assert likelihood_ratio_monotone(Belief.from_strings(["1/10", "9/10"]))
    assert not likelihood_ratio_monotone(BIMODAL)


class TestFromMills:
    def test_examples(self, uniform3, p_ex2):
        assert belief_from_mills((2, 1)) == uniform3
        assert belief_from_mills((3, F(1, 2))) == p_ex2
        assert belief_from_mills(()) == Belief((F(1),))

    def test_round_trip(self):
        r = (F(7, 2), F(5, 3), F(2, 9))
        assert mills_ratios(belief_from_mills(r))[:-1] == r

    def test_log_concavity_shortcut(self):
        for r in [(2, 1), (3, F(1, 2)), (F(1, 2), 3), (5, 4, 3, 2, 1), (F(1, 10), F(1, 20))]:
            assert log_concavity_from_mills(r) == is_log_concave(belief_from_mills(r))

    def test_positive_targets(self):
        with pytest.raises(DomainError):
            belief_from_mills((1, 0))


class TestPerturb:
    def test_zero_radius(self, uniform3):
        assert perturb(uniform3, 0) == [uniform3]

    def test_pairs(self, uniform3):
        out = perturb(uniform3, F(1, 100))
        assert len(out) == 6 and len(set(out)) == 6
        assert all(sum(p.probs) == 1 for p in out)
        assert all(max(abs(a - b) for a, b in zip(p.probs, uniform3.probs)) == F(1, 100) for p in out)

    def test_signs(self, uniform3):
        assert len(perturb(uniform3, F(1, 100), directions="signs")) == 12

    def test_strict_log_concavity_survives(self):
        p = Belief.from_strings(["1/6", "1/2", "1/3"])
        assert is_strictly_log_concave(p)
        assert all(is_log_concave(q) for q in perturb(p, F(1, 100), directions="signs"))

    def test_radius_too_large(self, uniform3):
        with pytest.raises(DomainError):
            perturb(uniform3, F(1, 3))


class TestGrid:
    def test_compositions(self):
        assert list(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
        assert grid_size(4, 2) == 3 and grid_size(2, 3) == 0

    def test_grid(self):
        assert belief_grid(1, 1) == [Belief((F(1),))]
        assert belief_grid(1, 3) == []
        g = belief_grid(4, 3)
        assert g == [Belief.from_strings(["1/4", "1/2", "1/4"])]
        assert len(belief_grid(4, 3, log_concave_only=False)) == 3
        assert Belief.uniform(3) in belief_grid(12, 3)

    def test_neighbours(self):
        nb = set(grid_neighbours(Belief.uniform(3), 3))
        assert nb == set()  # every step leaves the interior
        nb = set(grid_neighbours(Belief.from_strings(["1/3", "1/3", "1/3"]), 6))
        assert len(nb) == 6
        with pytest.raises(DomainError):
            list(grid_neighbours(Belief.uniform(3), 4))
