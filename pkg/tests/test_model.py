from fractions import Fraction as F

import pytest

from discrete_screening import (
    NULL_CONTRACT,
    OUTSIDE,
    Contract,
    ContractAssignment,
    Menu,
    TypeSpace,
    agent_payoff,
    best_response_agent,
    principal_payoff,
)
from discrete_screening.exceptions import DomainError, InvariantViolation
from discrete_screening.model import as_contract


class TestTypeSpace:
    def test_example_grid(self):
        T = TypeSpace(3, 100, 50)
        assert T.kappas == (F(299, 100), F(199, 100), F(99, 100))
        assert [T.ceil_kappa(i) for i in (1, 2, 3)] == [3, 2, 1]
        assert T.thetas == (F(99, 100), F(199, 100), F(299, 100))
        assert T.index_of(F(199, 100)) == 2
        assert T.grid_condition and T.t_max == 50

    def test_transfer_bound(self):
        assert TypeSpace(3, 100, 50, transfer_bound=150).t_max == 150

    def test_grid_condition_reported(self):
        assert not TypeSpace(3, 10, 10).grid_condition
        assert not TypeSpace(3, 100, 3).grid_condition

    @pytest.mark.parametrize("args", [(0, 10, 5), (2, 1, 5), (2, 10, -1), (2, 10, 5, -3)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            TypeSpace(*args)

    def test_unknown_type(self):
        T = TypeSpace(3, 100, 50)
        assert not T.contains(F(1))
        with pytest.raises(DomainError):
            T.index_of(F(1))
        with pytest.raises(DomainError):
            T.kappa(4)


class TestPayoffs:
    def test_agent(self):
        assert agent_payoff(Contract(45, 135), F(299, 100)) == F(45, 100)
        assert agent_payoff(Contract(49, 141), F(99, 100)) == F(9249, 100)
        assert agent_payoff(OUTSIDE, F(99, 100)) == 0

    def test_agent_type_checked(self):
        with pytest.raises(DomainError):
            agent_payoff(Contract(1, 1), F(1, 2), TypeSpace(3, 100, 50))

    def test_principal(self, v_ex1):
        # 50*49 - 49^2/2 - 141
        assert principal_payoff(v_ex1, Contract(49, 141)) == F(2217, 2)
        assert principal_payoff(v_ex1, OUTSIDE) == 0
        assert principal_payoff(v_ex1, NULL_CONTRACT) == 0


class TestBestResponse:
    def test_example_menu(self, menu_ex1, T_ex1):
        assert best_response_agent(menu_ex1, F(299, 100)) == Contract(45, 135)
        assert best_response_agent(menu_ex1, F(199, 100)) == Contract(47, 139)
        assert best_response_agent(menu_ex1, F(99, 100), T_ex1) == Contract(49, 141)

    def test_payoffs_of_example_menu_for_top_cost(self, menu_ex1):
        theta = F(299, 100)
        assert [agent_payoff(c, theta) for c in menu_ex1] == [F(45, 100), F(-153, 100), F(-551, 100)]

    def test_outside(self):
        assert best_response_agent(Menu.of((10, 5)), F(99, 100)) is OUTSIDE
        assert best_response_agent(Menu.of((0, 0)), F(99, 100)) is OUTSIDE

    def test_tie_raises_off_grid(self):
        # theta = 1/2 is not a grid type; (2, 1) and (4, 2) tie
        with pytest.raises(InvariantViolation):
            best_response_agent(Menu.of((2, 2), (4, 3)), F(1, 2))

    def test_type_must_be_on_grid(self, menu_ex1, T_ex1):
        with pytest.raises(DomainError):
            best_response_agent(menu_ex1, F(1), T_ex1)


class TestContainers:
    def test_contract(self):
        with pytest.raises(DomainError):
            Contract(-1, 0)
        with pytest.raises(DomainError):
            Contract(F(1, 2), 0)
        assert Contract(2, 3).within(TypeSpace(2, 10, 5)) and not Contract(2, 6).within(TypeSpace(2, 10, 5))

    def test_outside_is_null(self):
        assert as_contract(OUTSIDE) == NULL_CONTRACT
        assert Menu.of(OUTSIDE, (1, 1)) == Menu.of((0, 0), (1, 1))

    def test_menu_set_semantics(self):
        M = Menu.of((1, 2), (1, 2), (0, 0))
        assert len(M) == 2 and (1, 2) in M
        assert list(M | [(3, 4)]) == [Contract(0, 0), Contract(1, 2), Contract(3, 4)]
        with pytest.raises(DomainError):
            Menu(frozenset())

    def test_assignment(self):
        a = ContractAssignment.from_lists([50, 50, 50], [150, 150, 150])
        assert a.distinct_count == 1 and a.menu() == Menu.of((50, 150))
        assert a[3] == Contract(50, 150)
        with pytest.raises(DomainError):
            a[0]
