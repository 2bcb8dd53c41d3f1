"""Types, contracts, menus and payoffs of the screening game."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .discrete_calc import (
    ConcavityReport,
    TabulatedFn,
    backward_diff,
    check_concavity,
    forward_diff,
)
from .exceptions import DomainError, InvariantViolation
from .validation import as_int, as_rational


@dataclass(frozen=True)
class TypeSpace:
    """The cost grid ``{1 - 1/gamma, ..., m - 1/gamma}`` and the contract grid.

    Quantities live on ``{0, ..., b}``. Transfers live on
    ``{0, ..., transfer_bound}``, which defaults to ``b``; a larger bound is
    needed whenever the optimal transfers outgrow the quantity grid.

    ``gamma > b > m`` is the regime in which every rounding identity holds
    for all quantities; it is reported by :attr:`grid_condition` rather than
    enforced, so that instances violating it can still be solved when the
    quantities actually used stay below ``gamma``.
    """

    m: int
    gamma: int
    b: int
    transfer_bound: int | None = None

    def __post_init__(self):
        m, gamma, b = as_int(self.m, "m"), as_int(self.gamma, "gamma"), as_int(self.b, "b")
        if m < 1:
            raise DomainError(f"need at least one type, got m = {m}")
        if gamma < 2:
            raise DomainError(f"gamma must be at least 2 so that types are non-integer, got {gamma}")
        if b < 0:
            raise DomainError(f"b must be non-negative, got {b}")
        tb = self.transfer_bound
        if tb is not None:
            tb = as_int(tb, "transfer_bound")
            if tb < 0:
                raise DomainError(f"transfer_bound must be non-negative, got {tb}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "transfer_bound", tb)

    @property
    def t_max(self) -> int:
        return self.b if self.transfer_bound is None else self.transfer_bound

    @property
    def grid_condition(self) -> bool:
        return self.gamma > self.b > self.m

    def kappa(self, i: int) -> Fraction:
        """Cost of the ``i``-th highest type (``i = 1`` is the most expensive)."""
        self._check_i(i)
        return Fraction(self.m - i + 1) - Fraction(1, self.gamma)

    def ceil_kappa(self, i: int) -> int:
        c = math.ceil(self.kappa(i))
        if c != self.kappa(i) + Fraction(1, self.gamma):
            raise InvariantViolation(f"ceil(kappa^{i}) != kappa^{i} + 1/gamma")
        return c

    @property
    def kappas(self) -> tuple[Fraction, ...]:
        return tuple(self.kappa(i) for i in range(1, self.m + 1))

    @property
    def thetas(self) -> tuple[Fraction, ...]:
        """The type set in increasing order."""
        return tuple(sorted(self.kappas))

    def index_of(self, theta) -> int:
        """Order-statistic index of a type value."""
        theta = as_rational(theta, "theta")
        for i in range(1, self.m + 1):
            if self.kappa(i) == theta:
                return i
        raise DomainError(f"theta = {theta} is not in the type set {[str(k) for k in self.thetas]}")

    def contains(self, theta) -> bool:
        try:
            self.index_of(theta)
        except DomainError:
            return False
        return True

    def _check_i(self, i):
        if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= self.m:
            raise DomainError(f"type index {i!r} outside 1..{self.m}")


@dataclass(frozen=True)
class ValueFunction:
    """The principal's benefit of output, tabulated on ``{0, ..., b}``."""

    table: TabulatedFn
    report: ConcavityReport = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.table, TabulatedFn):
            object.__setattr__(self, "table", TabulatedFn(tuple(self.table)))
        object.__setattr__(self, "report", check_concavity(self.table))

    @classmethod
    def quadratic(cls, linear, quad, b: int) -> "ValueFunction":
        """``v(q) = linear*q + quad*q**2`` tabulated once on ``{0, ..., b}``."""
        a, c = as_rational(linear, "linear"), as_rational(quad, "quad")
        return cls(TabulatedFn.from_callable(lambda q: a * q + c * q * q, b))

    @classmethod
    def from_values(cls, values: Iterable) -> "ValueFunction":
        return cls(TabulatedFn(tuple(values)))

    @property
    def b(self) -> int:
        return self.table.b

    def __call__(self, q: int) -> Fraction:
        return self.table(q)

    def fwd(self, q: int) -> Fraction:
        return forward_diff(self.table, q)

    def bwd(self, q: int) -> Fraction:
        return backward_diff(self.table, q)


@dataclass(frozen=True, order=True)
class Contract:
    """A quantity-transfer pair ``(q, t)``."""

    q: int
    t: int

    def __post_init__(self):
        q, t = as_int(self.q, "q"), as_int(self.t, "t")
        if q < 0 or t < 0:
            raise DomainError(f"contract ({q}, {t}) has a negative entry")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", t)

    @property
    def is_null(self) -> bool:
        return self.q == 0 and self.t == 0

    def within(self, T: TypeSpace) -> bool:
        return self.q <= T.b and self.t <= T.t_max

    def __str__(self):
        return f"({self.q},{self.t})"


class _OutsideOption:
    """The agent's no-trade alternative. Both players get zero from it."""

    _instance = None
    q = 0
    t = 0

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OUTSIDE"

    __str__ = __repr__

    def __reduce__(self):
        return (_OutsideOption, ())


OUTSIDE = _OutsideOption()

NULL_CONTRACT = Contract(0, 0)


def as_contract(c) -> Contract:
    """Identify the outside option with the null contract."""
    if c is OUTSIDE:
        return NULL_CONTRACT
    if isinstance(c, Contract):
        return c
    q, t = c
    return Contract(q, t)


@dataclass(frozen=True)
class Menu:
    """A non-empty finite set of contracts."""

    contracts: frozenset[Contract]

    def __post_init__(self):
        cs = frozenset(as_contract(c) for c in self.contracts)
        if not cs:
            raise DomainError("a menu must contain at least one contract")
        object.__setattr__(self, "contracts", cs)

    @classmethod
    def of(cls, *contracts) -> "Menu":
        return cls(frozenset(as_contract(c) for c in contracts))

    def __iter__(self):
        return iter(sorted(self.contracts))

    def __len__(self):
        return len(self.contracts)

    def __contains__(self, c):
        return as_contract(c) in self.contracts

    def __or__(self, other) -> "Menu":
        extra = other.contracts if isinstance(other, Menu) else {as_contract(c) for c in other}
        return Menu(self.contracts | frozenset(extra))

    def within(self, T: TypeSpace) -> bool:
        return all(c.within(T) for c in self.contracts)

    def __str__(self):
        return "{" + ", ".join(str(c) for c in self) + "}"


@dataclass(frozen=True)
class ContractAssignment:
    """One contract per type, listed by order statistic ``i = 1..m``."""

    contracts: tuple[Contract, ...]

    def __post_init__(self):
        cs = tuple(as_contract(c) for c in self.contracts)
        if not cs:
            raise DomainError("an assignment needs at least one type")
        object.__setattr__(self, "contracts", cs)

    @classmethod
    def from_lists(cls, quantities, transfers) -> "ContractAssignment":
        if len(quantities) != len(transfers):
            raise DomainError("quantities and transfers differ in length")
        return cls(tuple(Contract(q, t) for q, t in zip(quantities, transfers)))

    @property
    def m(self) -> int:
        return len(self.contracts)

    @property
    def quantities(self) -> tuple[int, ...]:
        return tuple(c.q for c in self.contracts)

    @property
    def transfers(self) -> tuple[int, ...]:
        return tuple(c.t for c in self.contracts)

    def __getitem__(self, i: int) -> Contract:
        """Contract of type ``i`` (1-based, matching the order statistics)."""
        if not 1 <= i <= self.m:
            raise DomainError(f"type index {i} outside 1..{self.m}")
        return self.contracts[i - 1]

    def menu(self) -> Menu:
        return Menu(frozenset(self.contracts))

    @cached_property
    def distinct_count(self) -> int:
        return len(set(self.contracts))

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.contracts) + "]"


def agent_payoff(c, theta, T: TypeSpace | None = None) -> Fraction:
    """``t - theta*q`` for a contract, zero for the outside option.

    With ``T`` given, ``theta`` must be one of its types.
    """
    theta = as_rational(theta, "theta")
    if T is not None and not T.contains(theta):
        raise DomainError(f"theta = {theta} is not a type of {T}")
    if c is OUTSIDE:
        return Fraction(0)
    c = as_contract(c)
    return c.t - theta * c.q


def principal_payoff(v: ValueFunction, c) -> Fraction:
    if c is OUTSIDE:
        return Fraction(0)
    c = as_contract(c)
    return v(c.q) - c.t


def best_response_agent(M: Menu, theta, T: TypeSpace | None = None):
    """The agent's unique best choice from ``M`` plus the outside option.

    The null contract ties with the outside option for every type; the tie is
    resolved in favour of :data:`OUTSIDE`. Any other tie is impossible for
    types on the grid and raises :class:`InvariantViolation`.
    """
    theta = as_rational(theta, "theta")
    if T is not None and not T.contains(theta):
        raise DomainError(f"theta = {theta} is not a type of {T}")
    best, best_u = OUTSIDE, Fraction(0)
    tied = []
    for c in M:
        if c.is_null:
            continue
        u = c.t - theta * c.q
        if u > best_u:
            best, best_u, tied = c, u, []
        elif u == best_u:
            tied.append(c)
    if tied:
        raise InvariantViolation(
            f"agent of type {theta} is indifferent between {best} and {tied[0]}"
        )
    return best
