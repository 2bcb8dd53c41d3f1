"""A scikit-learn style wrapper around the solver.

``fit`` takes the principal's belief (the only "data" in this problem) and
computes the optimal menu; ``predict`` maps agent types to the contracts
they pick from it. Hyper-parameters are the value function, the type-grid
parameter ``gamma`` and the transfer bound, so ``get_params``/``set_params``
and ``clone`` behave as usual.
"""

from __future__ import annotations

import warnings
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .beliefs import as_belief
from .model import TypeSpace, ValueFunction, as_contract, best_response_agent
from .solver import AssumptionWarning, solve
from .validation import as_rational


class ScreeningSolver(BaseEstimator):
    """Optimal integer-contract menu for a belief over the agent's cost.

    Parameters
    ----------
    value_fn : ValueFunction
        Benefit of output, tabulated on ``{0, ..., b}``.
    gamma : int
        Types are ``{1 - 1/gamma, ..., m - 1/gamma}``.
    transfer_bound : int or None
        Largest admissible transfer; ``None`` means ``b``.
    strict : bool
        Raise instead of warn when a soft assumption fails.
    """

    def __init__(self, value_fn: ValueFunction | None = None, gamma: int = 100, transfer_bound: int | None = None,
                 strict: bool = False):
        self.value_fn = value_fn
        self.gamma = gamma
        self.transfer_bound = transfer_bound
        self.strict = strict

    def fit(self, X, y=None):
        """Solve for the belief ``X`` (a sequence of ``m`` probabilities)."""
        if not isinstance(self.value_fn, ValueFunction):
            raise TypeError("value_fn must be a ValueFunction")
        p = as_belief(X)
        T = TypeSpace(p.m, self.gamma, self.value_fn.b, self.transfer_bound)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AssumptionWarning)
            sol = solve(self.value_fn, T, p, strict=self.strict)
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
        self.type_space_ = T
        self.belief_ = p
        self.solution_ = sol
        self.quantity_sets_ = sol.quantity_sets
        self.assignments_ = sol.assignments
        self.unique_ = sol.unique
        self.menu_ = sol.assignments[0].menu()
        self.n_types_ = p.m
        return self

    def predict(self, X) -> list:
        """Contract chosen from the fitted menu by each type in ``X``.

        With several optimal assignments the first (lexicographically
        smallest) menu is used. The outside option is reported as ``(0, 0)``.
        Types off the fitted grid raise ``DomainError``.
        """
        check_is_fitted(self, "menu_")
        return [as_contract(best_response_agent(self.menu_, as_rational(theta, "type"), self.type_space_)) for theta in X]

    def transform(self, X) -> np.ndarray:
        """``(q, t)`` of each type's choice as an integer array of shape ``(n, 2)``."""
        return np.array([[c.q, c.t] for c in self.predict(X)], dtype=np.int64).reshape(-1, 2)

    def score(self, X=None, y=None) -> Fraction:
        """Expected principal payoff of the optimal menu (exact)."""
        check_is_fitted(self, "solution_")
        return self.solution_.expected_payoff

    def __sklearn_is_fitted__(self):
        return hasattr(self, "solution_")
