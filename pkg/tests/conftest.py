from fractions import Fraction as F

import pytest

from discrete_screening import Belief, Menu, TypeSpace, ValueFunction

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {line}")


@pytest.fixture
def v_ex1():
    """50q - q^2/2 on the grid where it is increasing."""
    return ValueFunction.quadratic(50, F(-1, 2), 50)


@pytest.fixture
def T_ex1():
    return TypeSpace(3, 100, 50, transfer_bound=150)


@pytest.fixture
def uniform3():
    return Belief.uniform(3)


@pytest.fixture
def p_ex2():
    return Belief.from_strings(["1/4", "1/2", "1/4"])


@pytest.fixture
def menu_ex1():
    return Menu.of((45, 135), (47, 139), (49, 141))
