"""Delta-O rationalizability of menus.

Two routes are provided. :func:`is_delta_o_rationalizable` decides whether a
menu is an optimal menu, possibly padded with contracts nobody picks, for
some full-support log-concave belief at which the optimum is unique. It
works on Mills-ratio targets: the optimal quantities pin each target into
an open interval, and a belief is rebuilt from any admissible target vector.

:func:`fixed_point_check` runs the iterated reduction literally on a tiny
instance: every menu up to a small cardinality, beliefs on a finite grid,
and robustness to belief perturbations approximated by a one-step grid ball.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .beliefs import (
    Belief,
    belief_from_mills,
    belief_grid,
    format_rational,
    is_log_concave,
    log_concavity_from_mills,
    virtual_costs,
)
from .exceptions import CapRefusal, DomainError, InvariantViolation
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
from .solver import (
    check_instance,
    chosen_assignment,
    enumerate_optimal_menus,
    is_unique,
    is_valid_augmentation,
)

YES, NO, INCONCLUSIVE = "yes", "no", "inconclusive"


@dataclass(frozen=True)
class SearchConfig:
    """Budget for the search over Mills-ratio targets.

    ``grid_depth`` levels of a uniform dyadic grid (level 0 is the midpoint
    of every interval), then ``max_depth`` levels of points approaching the
    interval ends.
    """

    grid_depth: int = 3
    max_depth: int = 64
    max_evaluations: int = 20_000


@dataclass(frozen=True)
class PrincipalBelief:
    """A belief of the principal: a type marginal plus the agent's behaviour.

    Agent best responses are unique up to the payoff-irrelevant choice
    between the null contract and the outside option, so the behaviour part
    is the best-response map itself.
    """

    marginal: Belief
    T: TypeSpace

    def __post_init__(self):
        if not is_log_concave(self.marginal):
            raise DomainError(f"marginal {self.marginal} is not log-concave")
        if self.marginal.m != self.T.m:
            raise DomainError("marginal and type space disagree on the number of types")

    def choice(self, M: Menu, i: int):
        return best_response_agent(M, self.T.kappa(i))

    def expected_payoff(self, M: Menu, v: ValueFunction) -> Fraction:
        return sum(
            (self.marginal[i] * principal_payoff(v, self.choice(M, i)) for i in range(1, self.T.m + 1)),
            Fraction(0),
        )


@dataclass(frozen=True)
class Verdict:
    menu: Menu
    verdict: str
    witness: Belief | None = None
    failing_step: str | None = None
    reason: str = ""
    base: ContractAssignment | None = None

    @property
    def yes(self) -> bool:
        return self.verdict == YES

    def to_json(self) -> dict:
        out = {"menu": [[c.q, c.t] for c in self.menu], "verdict": self.verdict}
        if self.witness is not None:
            out["witness_belief"] = self.witness.to_strings()
        if self.failing_step is not None:
            out["failing_step"] = self.failing_step
        if self.reason:
            out["reason"] = self.reason
        if self.base is not None:
            out["assignment"] = [[c.q, c.t] for c in self.base.contracts]
        return out


def level1_principal(M: Menu, v: ValueFunction) -> bool:
    """Some contract in ``M`` leaves the principal strictly positive payoff."""
    return any(principal_payoff(v, c) > 0 for c in M.contracts)


def level1_agent(M: Menu, T: TypeSpace) -> tuple:
    """Each type's unique best response, by order statistic."""
    return tuple(best_response_agent(M, T.kappa(i)) for i in range(1, T.m + 1))


def formula_transfers(quantities: Sequence[int], T: TypeSpace) -> tuple[int, ...]:
    return tuple(T.ceil_kappa(i) * quantities[i - 1] + sum(quantities[: i - 1]) for i in range(1, T.m + 1))


def is_formula_assignment(a: ContractAssignment, T: TypeSpace) -> bool:
    qs = a.quantities
    increasing = all(qs[k] < qs[k + 1] for k in range(len(qs) - 1))
    return increasing and a.transfers == formula_transfers(qs, T)


def find_formula_base(M: Menu, T: TypeSpace) -> ContractAssignment | None:
    """A strictly increasing formula-transfer assignment drawn from ``M`` (plus the null contract)."""
    pool = sorted(set(M.contracts) | {Contract(0, 0)})

    def extend(prefix):
        i = len(prefix) + 1
        if i > T.m:
            return prefix
        done = sum(c.q for c in prefix)
        last = prefix[-1].q if prefix else -1
        for c in pool:
            if c.q > last and c.t == T.ceil_kappa(i) * c.q + done:
                found = extend(prefix + [c])
                if found is not None:
                    return found
        return None

    found = extend([])
    if found is None:
        return None
    return ContractAssignment(tuple(found))


def target_boxes(v: ValueFunction, T: TypeSpace, quantities: Sequence[int]) -> list[tuple[Fraction, Fraction | None]]:
    """Open intervals ``(lo, hi)`` for the Mills ratios of types ``1..m-1``.

    ``hi is None`` means unbounded; ``lo`` already includes positivity.
    """
    boxes = []
    for i in range(1, T.m):
        q = quantities[i - 1]
        c = T.ceil_kappa(i)
        lo = v.fwd(q) - c if q < v.b else None
        hi = v.bwd(q) - c if q > 0 else None
        lo = Fraction(0) if lo is None or lo < 0 else lo
        boxes.append((lo, hi))
    return boxes


def _top_is_strict(v: ValueFunction, T: TypeSpace, q: int) -> bool:
    c = T.ceil_kappa(T.m)
    if q < v.b and not v.fwd(q) < c:
        return False
    if q > 0 and not v.bwd(q) > c:
        return False
    return True


def _infeasibility(boxes) -> str | None:
    """A proof that no log-concave belief hits every box, or ``None``."""
    for k, (lo, hi) in enumerate(boxes, start=1):
        if hi is not None and hi <= lo:
            return f"empty_box:{k}"
    n = len(boxes)
    # log-concavity forces non-increasing Mills ratios
    for a in range(n):
        for b_ in range(a + 1, n):
            hi_a = boxes[a][1]
            if hi_a is not None and hi_a <= boxes[b_][0]:
                return f"mills_monotonicity:{a + 1},{b_ + 1}"
    # r_k (1 + r_{k+2}) >= r_{k+1} (1 + r_{k+1}), with r = 0 beyond the last box
    his = [hi for _, hi in boxes] + [Fraction(0), Fraction(0)]
    los = [lo for lo, _ in boxes] + [Fraction(0), Fraction(0)]
    for k in range(n):
        if his[k] is None or his[k + 2] is None:
            continue
        if his[k] * (1 + his[k + 2]) <= los[k + 1] * (1 + los[k + 1]) and k + 1 < n:
            return f"log_concavity_bound:{k + 1}"
    return None


def _grid_points(lo: Fraction, hi: Fraction | None, level: int) -> list[Fraction]:
    """Dyadic points of an open interval, midpoint first."""
    if hi is not None:
        den = 2 ** (level + 1)
        return [lo + (hi - lo) * Fraction(j, den) for j in range(1, den)]
    return [lo + 1] + [lo + Fraction(2) ** k for k in range(-level, level + 1) if k != 0]


def _edge_points(lo: Fraction, hi: Fraction | None, level: int) -> list[Fraction]:
    """Points closing in on both ends of an open interval."""
    if hi is not None:
        w = (hi - lo) / 2 ** (level + 1)
        return [lo + w, (lo + hi) / 2, hi - w]
    return [lo + Fraction(1, 2**level), lo + 1, lo + 2**level]


def _candidates(boxes, config: SearchConfig):
    for level in range(config.grid_depth + 1):
        yield from itertools.product(*(_grid_points(lo, hi, level) for lo, hi in boxes))
    for level in range(1, config.max_depth + 1):
        yield from itertools.product(*(_edge_points(lo, hi, level) for lo, hi in boxes))


def search_mills_targets(boxes, config: SearchConfig = SearchConfig()) -> tuple[tuple[Fraction, ...] | None, int]:
    """Find targets inside every open box whose belief is log-concave.

    A coarse dyadic grid comes first; after it, every coordinate is pushed
    towards either end of its box (or held at the midpoint) with the
    distance to the end halving at each level, because log-concavity tends
    to be attainable only near a corner of the boxes.

    Returns ``(targets, evaluations)``; ``targets`` is ``None`` when the
    budget runs out.
    """
    if not boxes:
        return (), 0
    seen = set()
    evals = 0
    for combo in _candidates(boxes, config):
        if combo in seen:
            continue
        seen.add(combo)
        evals += 1
        if log_concavity_from_mills(combo):
            return combo, evals
        if evals >= config.max_evaluations:
            break
    return None, evals


def is_delta_o_rationalizable(
    M: Menu, v: ValueFunction, T: TypeSpace, search: SearchConfig = SearchConfig()
) -> Verdict:
    """Decide membership of ``M`` in the union of augmented optimal menus.

    The steps, in order: the agent's choices must form a strictly increasing
    assignment with formula transfers (if ``M`` contains such an assignment
    that some type abandons, the failing step is ``augmentation``); the most
    efficient type's quantity must be strictly efficient; and some
    log-concave belief must put every other virtual cost strictly inside its
    first-order interval. A found witness is re-validated from scratch.
    """
    check_instance(v, T, strict=True)
    outside = [str(c) for c in M.contracts if not c.within(T)]
    if outside:
        raise DomainError(f"contracts {outside} lie outside the contract grid")
    chosen = chosen_assignment(M, T)
    if not is_formula_assignment(chosen, T):
        base = find_formula_base(M, T)
        if base is not None:
            i = next(k for k in range(1, T.m + 1) if chosen[k] != base[k])
            return Verdict(
                M,
                NO,
                failing_step="augmentation",
                reason=f"type {i} picks {chosen[i]} instead of its designed contract {base[i]}",
                base=base,
            )
        if chosen.distinct_count < T.m:
            return Verdict(M, NO, failing_step="distinct_choices",
                           reason=f"only {chosen.distinct_count} distinct choices for {T.m} types")
        qs = chosen.quantities
        if any(qs[k] >= qs[k + 1] for k in range(T.m - 1)):
            return Verdict(M, NO, failing_step="monotonicity", reason=f"chosen quantities {qs} not increasing")
        return Verdict(M, NO, failing_step="transfer_formula",
                       reason=f"transfers {chosen.transfers} differ from {formula_transfers(qs, T)}")
    base = chosen
    qs = base.quantities
    if not _top_is_strict(v, T, qs[-1]):
        return Verdict(M, NO, failing_step="top_efficiency",
                       reason=f"q^{T.m} = {qs[-1]} is not the strict efficient quantity", base=base)
    boxes = target_boxes(v, T, qs)
    proof = _infeasibility(boxes)
    if proof is not None:
        return Verdict(M, NO, failing_step="feasibility", reason=proof, base=base)
    targets, evals = search_mills_targets(boxes, search)
    if targets is None:
        return Verdict(M, INCONCLUSIVE, failing_step="feasibility",
                       reason=f"no log-concave belief found in {evals} evaluations", base=base)
    witness = belief_from_mills(targets)
    _revalidate(M, v, T, witness, base)
    return Verdict(M, YES, witness=witness, base=base)


def _revalidate(M, v, T, witness, base):
    if not is_log_concave(witness):
        raise InvariantViolation(f"witness {witness} is not log-concave")
    if not is_unique(v, T, witness):
        raise InvariantViolation(f"optimum at witness {witness} is not unique")
    optimal = enumerate_optimal_menus(v, T, witness)
    if optimal != (base,):
        raise InvariantViolation(f"witness {witness} yields {optimal[0]}, not {base}")
    if not is_valid_augmentation(M, base, T):
        raise InvariantViolation("witness menu does not pass the augmentation check")


# ---------------------------------------------------------------------------
# literal reduction on a tiny instance


@dataclass
class LevelSummary:
    level: int
    principal: frozenset
    agent_cells: int
    agent_tied_cells: int
    description: str

    @property
    def agent_strategies(self) -> int:
        """Surviving agent strategies; every tied cell is a null-versus-outside choice."""
        return 2**self.agent_tied_cells


@dataclass
class GridAgreement:
    denominator: int
    grid_size: int
    grid_only: list = field(default_factory=list)
    exact_only: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    boundary_explained: dict = field(default_factory=dict)

    @property
    def disagreements(self) -> int:
        return len(self.grid_only) + len(self.exact_only)


@dataclass
class LevelReport:
    levels: list[LevelSummary]
    stabilization_level: int
    n_menus: int
    grid_denominator: int
    exact_yes: frozenset
    agreement: GridAgreement | None = None

    def principal(self, k: int) -> frozenset:
        return self.levels[k - 1].principal

    def summary(self) -> list[str]:
        out = [
            f"level {s.level}: |R_P| = {len(s.principal)}, agent strategies = 2^{s.agent_tied_cells} "
            f"({s.description})"
            for s in self.levels
        ]
        out.append(f"stabilizes at level {self.stabilization_level}")
        if self.agreement is not None:
            a = self.agreement
            out.append(
                f"grid d = {a.denominator}: {a.disagreements} disagreements "
                f"({len(a.grid_only)} grid-only, {len(a.exact_only)} exact-only), "
                f"{len(a.inconclusive)} inconclusive"
            )
        return out


def enumerate_menus(T: TypeSpace, max_size: int) -> list[Menu]:
    contracts = [Contract(q, t) for q in range(T.b + 1) for t in range(T.t_max + 1)]
    out = []
    for k in range(1, max_size + 1):
        out.extend(Menu(frozenset(c)) for c in itertools.combinations(contracts, k))
    return out


def _grid_from(grid, m):
    if isinstance(grid, int):
        return grid, belief_grid(grid, m)
    beliefs = list(grid)
    if not beliefs:
        raise DomainError("belief grid is empty")
    d = 1
    for p in beliefs:
        for x in p.probs:
            d = math.lcm(d, x.denominator)
    return d, [p for p in beliefs if is_log_concave(p)]


def _neighbourhoods(beliefs: list[Belief], d: int) -> list[list[int]]:
    step = Fraction(1, d)
    out = []
    for a, p in enumerate(beliefs):
        out.append(
            [b for b, q in enumerate(beliefs) if b != a and max(abs(x - y) for x, y in zip(p.probs, q.probs)) <= step]
        )
    return out


def fixed_point_check(
    v: ValueFunction,
    T: TypeSpace,
    grid,
    max_b: int = 4,
    max_m: int = 2,
    max_menu_size: int | None = None,
    levels: int = 3,
    cross_check: bool = True,
    search: SearchConfig = SearchConfig(),
) -> LevelReport:
    """Run the iterated reduction on every menu of a tiny instance.

    ``grid`` is a denominator ``d`` (all full-support log-concave beliefs
    with that denominator) or an explicit list of beliefs. A menu survives a
    principal level when, at some grid belief and at every grid belief one
    step away, it earns the maximal expected payoff among all enumerated
    menus. Restricting menus to at most ``m + 1`` contracts loses no optimal
    payoff because at most ``m`` contracts are ever chosen.
    """
    check_instance(v, T, strict=True)
    max_menu_size = T.m + 1 if max_menu_size is None else max_menu_size
    if T.b > max_b or T.m > max_m or max_menu_size > T.m + 1:
        raise CapRefusal(
            f"fixed-point check is limited to b <= {max_b}, m <= {max_m}, menus of at most m + 1 "
            f"contracts (got b = {T.b}, m = {T.m}, menu size {max_menu_size})"
        )
    if max_menu_size < T.m:
        raise DomainError("menus must be allowed at least m contracts")
    d, beliefs = _grid_from(grid, T.m)
    if not beliefs:
        raise DomainError("no log-concave belief on the grid")
    menus = enumerate_menus(T, max_menu_size)
    nbrs = _neighbourhoods(beliefs, d)

    # agent level 1: per (type, menu) sets of best responses, literal argmax over M + outside
    cells = [[_br_set(M, T.kappa(i)) for i in range(1, T.m + 1)] for M in menus]
    tied = 0
    for row in cells:
        for s in row:
            if len(s) > 1:
                tied += 1
                if set(map(as_contract, s)) != {Contract(0, 0)}:
                    raise InvariantViolation(f"agent tie {sorted(map(str, s))} beyond null versus outside")

    # principal payoffs of the surviving agent behaviour, scaled to integers
    Lv = 1
    for x in v.table.values:
        Lv = math.lcm(Lv, x.denominator)
    umat = np.array(
        [[int(principal_payoff(v, next(iter(s))) * Lv) for s in row] for row in cells], dtype=object
    )
    pmat = np.array([[int(x * d) for x in p.probs] for p in beliefs], dtype=object)
    payoff = umat.dot(pmat.T)  # menus x beliefs
    best = payoff.max(axis=0)
    is_br = payoff == best[np.newaxis, :]

    summaries = []
    r_prev = frozenset(range(len(menus)))
    r1 = frozenset(k for k, M in enumerate(menus) if level1_principal(M, v))
    summaries.append(LevelSummary(1, r1, len(cells) * T.m, tied,
                                  "principal keeps menus with a strictly profitable contract"))
    r_prev = r1
    for k in range(2, levels + 1):
        robust = set()
        for mk in r_prev:
            row = is_br[mk]
            for c in range(len(beliefs)):
                if row[c] and all(row[n] for n in nbrs[c]):
                    robust.add(mk)
                    break
        rk = frozenset(robust)
        # agent best responses ignore beliefs, so the agent level repeats itself
        summaries.append(LevelSummary(k, rk, len(cells) * T.m, tied,
                                      "robust best responses to beliefs on surviving agent behaviour"))
        r_prev = rk

    stab = levels
    for k in range(1, levels):
        same_agent = summaries[k].agent_tied_cells == summaries[k - 1].agent_tied_cells
        if summaries[k].principal == summaries[k - 1].principal and same_agent:
            stab = k
            break

    level_principal = [frozenset(menus[i] for i in s.principal) for s in summaries]
    for s, named in zip(summaries, level_principal):
        s.principal = named

    exact_yes = frozenset()
    agreement = None
    if cross_check:
        exact = {}
        for mk, M in enumerate(menus):
            exact[mk] = is_delta_o_rationalizable(M, v, T, search)
        exact_yes = frozenset(menus[k] for k, ver in exact.items() if ver.yes)
        grid_r2 = summaries[1].principal if levels >= 2 else frozenset()
        agreement = GridAgreement(d, len(beliefs))
        for mk, M in enumerate(menus):
            ver = exact[mk]
            if ver.verdict == INCONCLUSIVE:
                agreement.inconclusive.append(M)
            in_grid = M in grid_r2
            if in_grid and not ver.yes:
                agreement.grid_only.append(M)
            elif ver.yes and not in_grid:
                agreement.exact_only.append(M)
                agreement.boundary_explained[M] = _boundary_explained(v, T, beliefs, nbrs, ver.base, is_br[mk])
    return LevelReport(summaries, stab, len(menus), d, exact_yes, agreement)


def _br_set(M: Menu, theta) -> frozenset:
    """All maximizers of the agent's payoff over ``M`` and the outside option."""
    options = [OUTSIDE] + sorted(M.contracts)
    vals = [Fraction(0) if c is OUTSIDE else c.t - theta * c.q for c in options]
    top = max(vals)
    return frozenset(c for c, u in zip(options, vals) if u == top)


def _strictly_inside(v, T, p, quantities) -> bool:
    phis = virtual_costs(p, T)
    for i, q in enumerate(quantities, start=1):
        if q < v.b and not v.fwd(q) < phis[i - 1]:
            return False
        if q > 0 and not v.bwd(q) > phis[i - 1]:
            return False
    return True


def _boundary_explained(v, T, beliefs, nbrs, base, br_row) -> bool:
    """Whether the grid misses a rationalizable menu only because of resolution.

    True when every grid belief at which the menu is a best response has a
    grid neighbour outside the menu's open optimality region (on or beyond
    a first-order boundary), so no one-step ball fits inside the region.
    """
    qs = base.quantities
    centres = [c for c in range(len(beliefs)) if br_row[c]]
    return all(
        any(not _strictly_inside(v, T, beliefs[n], qs) for n in nbrs[c]) or not _strictly_inside(v, T, beliefs[c], qs)
        for c in centres
    )


def menu_key(M: Menu) -> tuple:
    return tuple((c.q, c.t) for c in M)


def describe(M: Menu) -> str:
    return str(M)


__all__ = [
    "INCONCLUSIVE",
    "LevelReport",
    "NO",
    "PrincipalBelief",
    "SearchConfig",
    "Verdict",
    "YES",
    "enumerate_menus",
    "find_formula_base",
    "fixed_point_check",
    "formula_transfers",
    "is_delta_o_rationalizable",
    "level1_agent",
    "level1_principal",
    "search_mills_targets",
    "target_boxes",
]
