"""Brute-force reference solutions.

Nothing here uses first-order conditions, virtual costs or transfer
formulas. The optimal assignment is found by enumerating every
``(q^1, t^1, ..., q^m, t^m)`` on the grid, keeping those that satisfy all
weak incentive and participation constraints, and maximizing the expected
principal payoff. Payoffs are rescaled to integers so the enumeration can be
vectorized with numpy without losing exactness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from .beliefs import Belief, as_belief
from .exceptions import CapRefusal, DomainError, InvariantViolation
from .model import OUTSIDE, Contract, ContractAssignment, Menu, TypeSpace, ValueFunction
from .validation import as_rational, parallel_map

DEFAULT_MAX_B = 12
DEFAULT_MAX_M = 3


@dataclass(frozen=True)
class OracleResult:
    payoff: Fraction
    assignments: tuple[ContractAssignment, ...]
    n_feasible: int
    n_enumerated: int

    @property
    def argmax(self) -> frozenset[ContractAssignment]:
        return frozenset(self.assignments)


def _lcm_of_denominators(values) -> int:
    out = 1
    for x in values:
        out = math.lcm(out, Fraction(x).denominator)
    return out


def _contracts(T: TypeSpace) -> list[Contract]:
    return [Contract(q, t) for q in range(T.b + 1) for t in range(T.t_max + 1)]


def brute_force_optimal(
    v: ValueFunction,
    T: TypeSpace,
    p,
    max_b: int = DEFAULT_MAX_B,
    max_m: int = DEFAULT_MAX_M,
    n_jobs: int = 1,
) -> OracleResult:
    """Exhaustive argmax of the principal's program over ``(D x D_t)^m``.

    The search is split into blocks by the contract of the most expensive
    type; blocks are independent and merged by keeping the best payoff.
    """
    p = as_belief(p)
    if p.m != T.m:
        raise DomainError(f"belief has {p.m} entries but there are {T.m} types")
    if v.b != T.b:
        raise DomainError(f"value function is tabulated on 0..{v.b}, grid bound is {T.b}")
    limit = (max_b + 1) ** (2 * max_m)
    size = ((T.b + 1) * (T.t_max + 1)) ** T.m
    if T.b > max_b or T.m > max_m or size > limit:
        raise CapRefusal(
            f"brute force needs b <= {max_b}, m <= {max_m} and at most {limit} assignments "
            f"(got b = {T.b}, m = {T.m}, transfer bound {T.t_max}: {size} assignments); "
            "raise max_b/max_m to override"
        )
    contracts = _contracts(T)
    K = len(contracts)

    # agent payoffs scaled by gamma: gamma*t - (gamma*kappa)*q, all integers
    gk = [int(T.kappa(i) * T.gamma) for i in range(1, T.m + 1)]
    Lv = _lcm_of_denominators(v.table.values)
    Lp = _lcm_of_denominators(p.probs)
    w = [int(p[i] * Lp) for i in range(1, T.m + 1)]
    vq = [int(v(c.q) * Lv) for c in contracts]
    up = [vq[k] - contracts[k].t * Lv for k in range(K)]

    bound = max(abs(x) for x in up) * sum(w) + 1
    bound = max(bound, T.gamma * T.t_max + max(gk) * T.b + 1)
    dtype = np.int64 if bound < 2**62 else object
    U = [np.array([T.gamma * c.t - g * c.q for c in contracts], dtype=dtype) for g in gk]
    V = np.array(up, dtype=dtype)

    cand = [np.flatnonzero(U[i] >= 0) for i in range(T.m)]
    blocks = [int(k) for k in cand[0]]
    parts = parallel_map(partial(_search_block, cand=cand, U=U, V=V, w=w), blocks, n_jobs)

    best = None
    winners: list[tuple[int, ...]] = []
    n_feasible = 0
    for val, idx, nf in parts:
        n_feasible += nf
        if val is None:
            continue
        if best is None or val > best:
            best, winners = val, list(idx)
        elif val == best:
            winners.extend(idx)
    if best is None:
        raise InvariantViolation("no feasible assignment; the null assignment should always be feasible")
    assignments = tuple(
        ContractAssignment(tuple(contracts[k] for k in combo)) for combo in sorted(winners)
    )
    payoff = Fraction(int(best), Lp * Lv)
    return OracleResult(payoff, assignments, n_feasible, K**T.m)


def _search_block(first: int, cand, U, V, w):
    """Best assignments whose first contract is ``first``; returns (value, index tuples, #feasible)."""
    m = len(U)
    if m == 1:
        return int(w[0] * V[first]), [(first,)], 1
    rest = cand[1:]
    shape = tuple(len(a) for a in rest)
    if 0 in shape:
        return None, [], 0
    dims = len(rest)

    def along(arr, axis):
        s = [1] * dims
        s[axis] = -1
        return arr.reshape(s)

    mask = np.ones(shape, dtype=bool)
    for a, idx in enumerate(rest):
        i = a + 1
        # first type does not envy type i, and type i does not envy the first type
        mask &= along(U[0][first] >= U[0][idx], a)
        mask &= along(U[i][idx] >= U[i][first], a)
    for a, ia in enumerate(rest):
        for b_, ib in enumerate(rest):
            if a != b_:
                i = a + 1
                mask &= along(U[i][ia], a) >= along(U[i][ib], b_)
    if not mask.any():
        return None, [], 0
    total = np.full(shape, w[0] * V[first], dtype=V.dtype)
    for a, idx in enumerate(rest):
        total = total + along(w[a + 1] * V[idx], a)
    feasible_vals = total[mask]
    best = feasible_vals.max()
    hits = np.argwhere(mask & (total == best))
    combos = [(first,) + tuple(int(rest[a][h[a]]) for a in range(dims)) for h in hits]
    return int(best), combos, int(mask.sum())


def brute_force_best_response(M: Menu, theta):
    """Linear scan over ``M`` and the outside option.

    The null contract and the outside option are interchangeable; a scan
    ending with either returns :data:`OUTSIDE`. Any other tie at the top
    raises :class:`InvariantViolation`.
    """
    theta = as_rational(theta, "theta")
    scored = [(Fraction(0), OUTSIDE)] + [(c.t - theta * c.q, c) for c in M.contracts]
    top = max(u for u, _ in scored)
    winners = {c for u, c in scored if u == top}
    non_null = {c for c in winners if c is not OUTSIDE and not c.is_null}
    if not non_null:
        return OUTSIDE
    if len(winners) > 1:
        raise InvariantViolation(f"type {theta} is indifferent among {sorted(map(str, winners))}")
    return non_null.pop()


def single_type_closed_form(v: ValueFunction, T: TypeSpace) -> tuple[frozenset[int], int]:
    """With one type: quantities maximizing ``v(q) - ceil(kappa) q`` by scan, and the transfer multiplier."""
    if T.m != 1:
        raise DomainError("closed form only for a single type")
    c = T.ceil_kappa(1)
    vals = [v(q) - c * q for q in range(T.b + 1)]
    best = max(vals)
    return frozenset(q for q, x in enumerate(vals) if x == best), c
