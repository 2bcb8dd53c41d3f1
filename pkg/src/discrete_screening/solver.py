"""Optimal screening menus from the discrete first-order conditions.

For each type the optimal quantities are the solutions of
``fwd v(q) <= phi^i <= bwd v(q)`` where ``phi^i`` is the virtual cost.
Transfers follow from the binding local downward incentive constraints and
the binding participation constraint of the most expensive type:
``t^i = ceil(kappa^i) q^i + sum_{j<i} q^j``. Each type keeps a round-up
rent of ``q^i / gamma`` on top of its information rent.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .beliefs import Belief, as_belief, format_rational, is_log_concave, virtual_costs
from .discrete_calc import ceil_rat, ceil_type_product, solve_foc
from .exceptions import CapacityError, DomainError, InvariantViolation, PreconditionError
from .model import (
    OUTSIDE,
    Contract,
    ContractAssignment,
    Menu,
    TypeSpace,
    ValueFunction,
    as_contract,
    best_response_agent,
    principal_payoff,
)

logger = logging.getLogger(__name__)


class AssumptionWarning(UserWarning):
    """A soft assumption of the model fails; results are still computed."""


SOFT_ASSUMPTIONS = ("increasing", "grid_condition", "bounded_concavity", "no_integer_forward_diff")


def check_instance(v: ValueFunction, T: TypeSpace, p: Belief | None = None, strict: bool = False) -> list[str]:
    """Validate an instance and return the names of failed soft assumptions.

    Normalization ``v(0) = 0``, strict discrete concavity, matching grids and
    a full-support log-concave belief are always required. Monotonicity of
    ``v``, ``gamma > b > m``, the concavity bound and non-integer forward
    differences are soft: they are returned (and warned about) unless
    ``strict`` is set, in which case any failure raises.
    """
    rep = v.report
    if v.b != T.b:
        raise DomainError(f"value function is tabulated on 0..{v.b} but the grid bound is b = {T.b}")
    if not rep.zero_at_origin:
        raise PreconditionError(f"v(0) must be 0, got {v(0)}")
    if not rep.strictly_concave:
        raise PreconditionError("v must be strictly discrete concave")
    if p is not None:
        if p.m != T.m:
            raise DomainError(f"belief has {p.m} entries but there are {T.m} types")
        if not is_log_concave(p):
            raise PreconditionError(f"belief {p} is not log-concave")
    soft = {
        "increasing": rep.increasing,
        "grid_condition": T.grid_condition,
        "bounded_concavity": rep.bounded_concavity,
        "no_integer_forward_diff": rep.no_integer_forward_diff,
    }
    failed = [name for name in SOFT_ASSUMPTIONS if not soft[name]]
    if failed and strict:
        raise PreconditionError(f"assumptions fail: {', '.join(failed)}")
    return failed


def optimal_quantities(v: ValueFunction, T: TypeSpace, p, strict: bool = False) -> tuple[frozenset[int], ...]:
    """Per-type optimal quantity sets, each of size one or two."""
    p = as_belief(p)
    check_instance(v, T, p, strict=strict)
    return tuple(solve_foc(v.table, phi) for phi in virtual_costs(p, T))


def transfers(quantities: Sequence[int], T: TypeSpace) -> tuple[int, ...]:
    """Transfers implied by the binding constraints, checked three ways.

    The recursion through the rounded increment ``ceil(kappa^i (q^i - q^(i-1)))``,
    the recursion through ``ceil(kappa^i) (q^i - q^(i-1))`` and the closed form
    must coincide; the first agrees with the others only for non-decreasing
    quantities below ``gamma``, so it is only compared there.
    """
    qs = tuple(int(q) for q in quantities)
    if len(qs) != T.m:
        raise DomainError(f"need {T.m} quantities, got {len(qs)}")
    for i, q in enumerate(qs, start=1):
        if not 0 <= q <= T.b:
            raise DomainError(f"q^{i} = {q} outside 0..{T.b}")
    closed = tuple(T.ceil_kappa(i) * qs[i - 1] + sum(qs[: i - 1]) for i in range(1, T.m + 1))
    rec = []
    prev_t, prev_q = 0, 0
    for i, q in enumerate(qs, start=1):
        step = q - prev_q
        t = prev_t + T.ceil_kappa(i) * step
        if step >= 0:
            ceil_type_product(T.ceil_kappa(i), T.gamma, step)
            if prev_t + ceil_rat(T.kappa(i) * step) != t:
                raise InvariantViolation(f"rounded increment disagrees at type {i}")
        rec.append(t)
        prev_t, prev_q = t, q
    if tuple(rec) != closed:
        raise InvariantViolation(f"recursive transfers {rec} differ from closed form {closed}")
    for i, t in enumerate(closed, start=1):
        if t > T.t_max:
            raise CapacityError(
                f"transfer t^{i} = {t} exceeds the transfer bound {T.t_max}; "
                f"use a transfer bound of at least {max(closed)}",
                index=i,
                transfer=t,
                bound=T.t_max,
            )
    return closed


def assignment_from_quantities(quantities: Sequence[int], T: TypeSpace) -> ContractAssignment:
    return ContractAssignment.from_lists(list(quantities), list(transfers(quantities, T)))


def _status(slack: Fraction) -> str:
    if slack > 0:
        return "strict"
    if slack == 0:
        return "equality"
    return "violated"


@dataclass(frozen=True)
class ConstraintReport:
    """Slack of every incentive (``i != j``) and participation constraint."""

    ic_slack: dict
    pc_slack: dict

    @property
    def ic(self) -> dict:
        return {k: _status(s) for k, s in self.ic_slack.items()}

    @property
    def pc(self) -> dict:
        return {k: _status(s) for k, s in self.pc_slack.items()}

    @property
    def all_hold(self) -> bool:
        return all(s >= 0 for s in self.ic_slack.values()) and all(s >= 0 for s in self.pc_slack.values())

    @property
    def all_strict(self) -> bool:
        return all(s > 0 for s in self.ic_slack.values()) and all(s > 0 for s in self.pc_slack.values())

    def violations(self) -> list[str]:
        out = [f"IC_{i},{j}" for (i, j), s in sorted(self.ic_slack.items()) if s < 0]
        out += [f"PC_{i}" for i, s in sorted(self.pc_slack.items()) if s < 0]
        return out


def verify_constraints(a: ContractAssignment, T: TypeSpace) -> ConstraintReport:
    if a.m != T.m:
        raise DomainError(f"assignment has {a.m} contracts but there are {T.m} types")
    own = {}
    ic = {}
    pc = {}
    for i in range(1, T.m + 1):
        k = T.kappa(i)
        ci = a[i]
        own[i] = ci.t - k * ci.q
        pc[i] = own[i]
        for j in range(1, T.m + 1):
            if j != i:
                cj = a[j]
                ic[(i, j)] = own[i] - (cj.t - k * cj.q)
    return ConstraintReport(ic, pc)


def agent_rent(a: ContractAssignment, T: TypeSpace, i: int) -> Fraction:
    """Rent of type ``i`` under formula transfers: ``q^i / gamma + sum_{j<i} q^j``."""
    qs = a.quantities
    rent = Fraction(qs[i - 1], T.gamma) + sum(qs[: i - 1])
    direct = a[i].t - T.kappa(i) * a[i].q
    if direct != rent:
        raise InvariantViolation(f"type {i}: rent {rent} but payoff {direct}; transfers are not formula transfers")
    return rent


@dataclass(frozen=True)
class MonotonicityReport:
    weak: bool
    strict: bool


def monotonicity_report(Q: Sequence[frozenset[int]]) -> MonotonicityReport:
    weak = all(min(Q[k + 1]) >= max(Q[k]) for k in range(len(Q) - 1))
    strict = all(min(Q[k + 1]) > max(Q[k]) for k in range(len(Q) - 1))
    return MonotonicityReport(weak, strict)


@dataclass(frozen=True)
class UniquenessResult:
    """Whether every optimal quantity set is a singleton.

    ``certificate`` lists the type indices whose first-order conditions hold
    with equality, i.e. whose virtual cost coincides with a forward
    difference and the next backward difference.
    """

    unique: bool
    certificate: tuple[int, ...]

    def __bool__(self):
        return self.unique


def is_unique(v: ValueFunction, T: TypeSpace, p, strict: bool = False) -> UniquenessResult:
    p = as_belief(p)
    Q = optimal_quantities(v, T, p, strict=strict)
    phis = virtual_costs(p, T)
    cert = []
    for i, (qset, phi) in enumerate(zip(Q, phis), start=1):
        on_boundary = any(
            (q < v.b and v.fwd(q) == phi) or (q > 0 and v.bwd(q) == phi) for q in qset
        )
        if len(qset) > 1 or on_boundary:
            cert.append(i)
    return UniquenessResult(not cert, tuple(cert))


def expected_principal_payoff(v: ValueFunction, a: ContractAssignment, p) -> Fraction:
    p = as_belief(p)
    return sum((p[i] * principal_payoff(v, a[i]) for i in range(1, a.m + 1)), Fraction(0))


def reduced_objective(v: ValueFunction, T: TypeSpace, p, quantities: Sequence[int]) -> Fraction:
    """Expected payoff after substituting formula transfers: ``sum p^i (v(q^i) - phi^i q^i)``."""
    p = as_belief(p)
    phis = virtual_costs(p, T)
    return sum((p[i] * (v(q) - phis[i - 1] * q) for i, q in enumerate(quantities, start=1)), Fraction(0))


def enumerate_optimal_menus(v: ValueFunction, T: TypeSpace, p, strict: bool = False) -> tuple[ContractAssignment, ...]:
    """Every assignment picking one optimal quantity per type, with formula transfers.

    Assignments are returned in lexicographic order of their quantities.
    Each is checked against all incentive and participation constraints.
    """
    p = as_belief(p)
    Q = optimal_quantities(v, T, p, strict=strict)
    out = []
    for qs in itertools.product(*(sorted(s) for s in Q)):
        a = assignment_from_quantities(qs, T)
        rep = verify_constraints(a, T)
        if not rep.all_hold:
            raise InvariantViolation(f"optimal assignment {a} violates {rep.violations()}")
        out.append(a)
    return tuple(out)


def agent_prefers_larger(v: ValueFunction, T: TypeSpace, p, strict: bool = False) -> bool | None:
    """Whether the agent gains from the larger of two optimal quantities.

    Compares every pair of optimal assignments where one is pointwise at
    least the other; every type whose rent involves a differing quantity
    must strictly prefer the larger assignment. Returns ``None`` when there
    is only one optimal assignment.
    """
    menus = enumerate_optimal_menus(v, T, p, strict=strict)
    if len(menus) <= 1:
        return None
    for a, b in itertools.permutations(menus, 2):
        qa, qb = a.quantities, b.quantities
        if qa == qb or any(x < y for x, y in zip(qa, qb)):
            continue
        first = next(k for k, (x, y) in enumerate(zip(qa, qb), start=1) if x != y)
        for i in range(first, T.m + 1):
            if agent_rent(a, T, i) <= agent_rent(b, T, i):
                return False
    return True


def is_valid_augmentation(M: Menu, base: ContractAssignment, T: TypeSpace) -> bool:
    """True iff every type still picks its designed contract from ``M``.

    A designed null contract is matched by the outside option, so it need
    not appear in ``M``.
    """
    missing = [c for c in base.contracts if not c.is_null and c not in M]
    if missing:
        raise DomainError(f"base contracts {[str(c) for c in missing]} are not in the menu")
    for i in range(1, T.m + 1):
        if as_contract(best_response_agent(M, T.kappa(i))) != base[i]:
            return False
    return True


@dataclass(frozen=True)
class Solution:
    """Everything the solver knows about one instance."""

    v: ValueFunction = field(repr=False)
    T: TypeSpace
    p: Belief
    virtual_costs: tuple[Fraction, ...]
    quantity_sets: tuple[frozenset[int], ...]
    assignments: tuple[ContractAssignment, ...]
    uniqueness: UniquenessResult
    monotonicity: MonotonicityReport
    warnings: tuple[str, ...] = ()

    @property
    def unique(self) -> bool:
        return self.uniqueness.unique

    @property
    def collapsed(self) -> bool:
        """Some optimal assignment gives identical contracts to distinct types."""
        return any(a.distinct_count < self.T.m for a in self.assignments)

    @property
    def expected_payoff(self) -> Fraction:
        return expected_principal_payoff(self.v, self.assignments[0], self.p)

    def menus(self) -> list[Menu]:
        return [a.menu() for a in self.assignments]

    def rows(self) -> list[dict]:
        """Per-type report rows, one block per optimal assignment."""
        out = []
        for s, a in enumerate(self.assignments, start=1):
            for i in range(1, self.T.m + 1):
                c = a[i]
                out.append(
                    {
                        "solution": s,
                        "i": i,
                        "kappa": format_rational(self.T.kappa(i)),
                        "ceil_kappa": self.T.ceil_kappa(i),
                        "phi": format_rational(self.virtual_costs[i - 1]),
                        "Q": ";".join(str(q) for q in sorted(self.quantity_sets[i - 1])),
                        "q": c.q,
                        "t": c.t,
                        "rent": format_rational(agent_rent(a, self.T, i)),
                        "principal_payoff": format_rational(principal_payoff(self.v, c)),
                    }
                )
        return out


CSV_COLUMNS = ("solution", "i", "kappa", "ceil_kappa", "phi", "Q", "q", "t", "rent", "principal_payoff")


def solve(v: ValueFunction, T: TypeSpace, p, strict: bool = False) -> Solution:
    """Solve one instance and cross-check the payoff identities."""
    p = as_belief(p)
    failed = check_instance(v, T, p, strict=strict)
    for name in failed:
        warnings.warn(f"assumption '{name}' does not hold", AssumptionWarning, stacklevel=2)
    phis = virtual_costs(p, T)
    Q = tuple(solve_foc(v.table, phi) for phi in phis)
    assignments = enumerate_optimal_menus(v, T, p)
    payoffs = {expected_principal_payoff(v, a, p) for a in assignments}
    if len(payoffs) != 1:
        raise InvariantViolation(f"optimal assignments give different payoffs {sorted(payoffs)}")
    for a in assignments:
        if reduced_objective(v, T, p, a.quantities) != expected_principal_payoff(v, a, p):
            raise InvariantViolation("substituted objective disagrees with the explicit payoff")
    sol = Solution(
        v=v,
        T=T,
        p=p,
        virtual_costs=phis,
        quantity_sets=Q,
        assignments=assignments,
        uniqueness=is_unique(v, T, p),
        monotonicity=monotonicity_report(Q),
        warnings=tuple(failed),
    )
    logger.debug("solved %s: Q=%s unique=%s", p, Q, sol.unique)
    return sol


def choices(M: Menu, T: TypeSpace) -> tuple:
    """Best response of every type, listed by order statistic."""
    return tuple(best_response_agent(M, T.kappa(i)) for i in range(1, T.m + 1))


def chosen_assignment(M: Menu, T: TypeSpace) -> ContractAssignment:
    """The assignment induced by the agent's choices, with the outside option as ``(0, 0)``."""
    return ContractAssignment(tuple(as_contract(c) for c in choices(M, T)))


__all__ = [
    "AssumptionWarning",
    "CSV_COLUMNS",
    "ConstraintReport",
    "Contract",
    "MonotonicityReport",
    "OUTSIDE",
    "Solution",
    "UniquenessResult",
    "agent_prefers_larger",
    "agent_rent",
    "assignment_from_quantities",
    "check_instance",
    "chosen_assignment",
    "choices",
    "enumerate_optimal_menus",
    "expected_principal_payoff",
    "is_unique",
    "is_valid_augmentation",
    "monotonicity_report",
    "optimal_quantities",
    "reduced_objective",
    "solve",
    "transfers",
    "verify_constraints",
]
