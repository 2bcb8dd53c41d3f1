import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from discrete_screening import Contract, ValueFunction
from discrete_screening.estimator import ScreeningSolver
from discrete_screening.exceptions import DomainError, PreconditionError
from discrete_screening.solver import AssumptionWarning

THETAS = [F(299, 100), F(199, 100), F(99, 100)]


@pytest.fixture
def est(v_ex1):
    return ScreeningSolver(value_fn=v_ex1, gamma=100, transfer_bound=150)


def test_params_and_clone(est):
    params = est.get_params()
    assert params["gamma"] == 100 and params["transfer_bound"] == 150 and not params["strict"]
    twin = clone(est).set_params(gamma=200)
    assert twin.gamma == 200 and est.gamma == 100


def test_fit_predict(est, uniform3):
    est.fit(uniform3.probs)
    assert est.unique_ and est.n_types_ == 3
    assert est.predict(THETAS) == [Contract(45, 135), Contract(47, 139), Contract(49, 141)]
    assert np.array_equal(est.transform(THETAS), [[45, 135], [47, 139], [49, 141]])
    assert est.score() == F(6635, 6)


def test_string_belief(est):
    est.fit(["1/4", "1/2", "1/4"])
    assert not est.unique_ and len(est.assignments_) == 2
    assert est.quantity_sets_[1] == {47, 48}


def test_off_grid_type_rejected(est, uniform3):
    est.fit(uniform3)
    with pytest.raises(DomainError):
        est.predict([F(3, 2)])


def test_not_fitted(est):
    with pytest.raises(NotFittedError):
        est.predict(THETAS)


def test_soft_assumption_warns_or_raises(uniform3):
    v = ValueFunction.quadratic(253, F(-5, 2), 51)
    with pytest.warns(AssumptionWarning):
        ScreeningSolver(v, transfer_bound=150).fit(uniform3)
    with pytest.raises(PreconditionError):
        ScreeningSolver(v, transfer_bound=150, strict=True).fit(uniform3)


def test_requires_value_fn(uniform3):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(TypeError):
            ScreeningSolver().fit(uniform3)
