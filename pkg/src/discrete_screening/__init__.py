"""Optimal screening with integer contracts and non-integer costs.

Exact (rational) solver for a principal who offers quantity-transfer
contracts on an integer grid to an agent whose per-unit cost is one of
``m`` values just below the integers, plus a brute-force oracle and tests
of which menus survive iterated elimination under log-concave beliefs.
"""

__version__ = "0.1.0"

from .beliefs import (
    Belief,
    belief_from_mills,
    belief_grid,
    is_log_concave,
    likelihood_ratio_monotone,
    mills_ratio,
    perturb,
    virtual_cost,
    virtual_costs,
)
from .discrete_calc import TabulatedFn, backward_diff, check_concavity, forward_diff, second_diff, solve_foc
from .exceptions import (
    CapacityError,
    CapRefusal,
    DomainError,
    InvariantViolation,
    PreconditionError,
    ScreeningError,
)
from .model import (
    NULL_CONTRACT,
    OUTSIDE,
    Contract,
    ContractAssignment,
    Menu,
    TypeSpace,
    ValueFunction,
    agent_payoff,
    best_response_agent,
    principal_payoff,
)
from .oracle import brute_force_best_response, brute_force_optimal
from .rationalizability import (
    SearchConfig,
    Verdict,
    fixed_point_check,
    is_delta_o_rationalizable,
    level1_agent,
    level1_principal,
)
from .solver import (
    Solution,
    agent_prefers_larger,
    enumerate_optimal_menus,
    is_unique,
    is_valid_augmentation,
    optimal_quantities,
    solve,
    transfers,
    verify_constraints,
)

__all__ = [name for name in dir() if not name.startswith("_")]
