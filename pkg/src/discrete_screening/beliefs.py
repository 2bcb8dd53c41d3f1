"""Exact beliefs over the order statistics and the quantities derived from them.

A belief lists ``p^1, ..., p^m`` where ``p^i`` is the probability of the
``i``-th most expensive type. The Mills ratio of index ``i`` is the tail mass
above ``i`` divided by ``p^i``; adding it to the rounded-up cost gives the
virtual cost that drives the optimal quantities.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import DomainError
from .model import TypeSpace
from .validation import as_rational, check_index, check_probability_vector


@dataclass(frozen=True)
class Belief:
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", check_probability_vector(self.probs))

    @classmethod
    def uniform(cls, m: int) -> "Belief":
        return cls(tuple(Fraction(1, m) for _ in range(m)))

    @classmethod
    def from_strings(cls, values: Sequence[str]) -> "Belief":
        return cls(tuple(as_rational(v, "belief") for v in values))

    @property
    def m(self) -> int:
        return len(self.probs)

    def __getitem__(self, i: int) -> Fraction:
        """Probability of order statistic ``i`` (1-based)."""
        check_index(i, 1, self.m, "i")
        return self.probs[i - 1]

    def to_strings(self) -> list[str]:
        return [format_rational(p) for p in self.probs]

    def __str__(self):
        return "(" + ", ".join(format_rational(p) for p in self.probs) + ")"


def format_rational(x) -> str:
    x = as_rational(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def is_log_concave(p: Belief) -> bool:
    return all(p[i] * p[i] >= p[i + 1] * p[i - 1] for i in range(2, p.m))


def is_strictly_log_concave(p: Belief) -> bool:
    return all(p[i] * p[i] > p[i + 1] * p[i - 1] for i in range(2, p.m))


def mills_ratio(p: Belief, i: int) -> Fraction:
    check_index(i, 1, p.m, "i")
    return sum(p.probs[i:], Fraction(0)) / p[i]


def mills_ratios(p: Belief) -> tuple[Fraction, ...]:
    return tuple(mills_ratio(p, i) for i in range(1, p.m + 1))


def virtual_cost(p: Belief, T: TypeSpace, i: int) -> Fraction:
    if p.m != T.m:
        raise DomainError(f"belief has {p.m} entries but the type space has {T.m} types")
    return T.ceil_kappa(i) + mills_ratio(p, i)


def virtual_costs(p: Belief, T: TypeSpace) -> tuple[Fraction, ...]:
    return tuple(virtual_cost(p, T, i) for i in range(1, T.m + 1))


def likelihood_ratio_monotone(p: Belief) -> bool:
    """Exhaustive check that ``p^(i+k)/p^i >= p^(j+k)/p^j`` for ``i < j``, ``j + k <= m``."""
    m = p.m
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            for k in range(1, m - j + 1):
                # cross-multiplied; all entries are positive
                if p[i + k] * p[j] < p[j + k] * p[i]:
                    return False
    return True


def belief_from_mills(targets: Sequence) -> Belief:
    """The unique full-support belief whose first ``m - 1`` Mills ratios are ``targets``.

    Walks down the tail mass: with ``S_1 = 1``, each ``p^i = S_i / (1 + r^i)``
    and the remainder ``S_i * r^i / (1 + r^i)`` carries over; the last
    coordinate takes what is left. Log-concavity is not implied.
    """
    rs = tuple(as_rational(r, "target") for r in targets)
    for k, r in enumerate(rs):
        if r <= 0:
            raise DomainError(f"Mills target {k + 1} must be positive, got {r}")
    tail = Fraction(1)
    probs = []
    for r in rs:
        probs.append(tail / (1 + r))
        tail = tail * r / (1 + r)
    probs.append(tail)
    return Belief(tuple(probs))


def log_concavity_from_mills(targets: Sequence) -> bool:
    """Log-concavity of ``belief_from_mills(targets)`` without building it.

    Consecutive likelihood ratios are ``r^i / (1 + r^(i+1))`` with ``r^m = 0``,
    so the condition reads ``r^i (1 + r^(i+2)) >= r^(i+1) (1 + r^(i+1))``.
    """
    rs = [as_rational(r) for r in targets] + [Fraction(0)]
    return all(rs[k] * (1 + rs[k + 2]) >= rs[k + 1] * (1 + rs[k + 1]) for k in range(len(rs) - 2))


def perturb(p: Belief, radius, directions: str = "pairs") -> list[Belief]:
    """Beliefs within sup-norm distance ``radius`` of ``p``.

    ``directions="pairs"`` moves ``radius`` of mass from one coordinate to
    another for every ordered pair, giving ``m*(m-1)`` beliefs (or just ``p``
    when the radius is zero). ``"signs"`` additionally moves half the radius
    into and out of every coordinate, spreading the compensation evenly.
    """
    radius = as_rational(radius, "radius")
    if radius < 0:
        raise DomainError(f"radius must be non-negative, got {radius}")
    if radius == 0:
        return [p]
    if radius >= min(p.probs):
        raise DomainError(f"radius {radius} would leave the interior of the simplex")
    m = p.m
    out = []
    if directions not in ("pairs", "signs"):
        raise DomainError(f"unknown direction strategy {directions!r}")
    for i in range(m):
        for j in range(m):
            if i != j:
                q = list(p.probs)
                q[i] += radius
                q[j] -= radius
                out.append(Belief(tuple(q)))
    if directions == "signs" and m > 1:
        half = radius / 2
        for i in range(m):
            for sign in (1, -1):
                q = list(p.probs)
                q[i] += sign * half
                share = sign * half / (m - 1)
                for j in range(m):
                    if j != i:
                        q[j] -= share
                out.append(Belief(tuple(q)))
    return out


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` positive integers summing to ``total``, in lexicographic order."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def grid_size(d: int, m: int) -> int:
    from math import comb

    return comb(d - 1, m - 1) if d >= m else 0


def belief_grid(d: int, m: int, log_concave_only: bool = True) -> list[Belief]:
    """Full-support beliefs with common denominator ``d``, lexicographically ordered."""
    if d < 1 or m < 1:
        raise DomainError(f"need d >= 1 and m >= 1, got d = {d}, m = {m}")
    out = []
    for ks in compositions(d, m):
        p = Belief(tuple(Fraction(k, d) for k in ks))
        if not log_concave_only or is_log_concave(p):
            out.append(p)
    return out


def grid_neighbours(p: Belief, d: int) -> Iterator[Belief]:
    """Full-support grid beliefs at sup-norm distance exactly one step ``1/d`` or less, excluding ``p``."""
    ks = [pi * d for pi in p.probs]
    if any(k.denominator != 1 for k in ks):
        raise DomainError(f"{p} is not on the grid with denominator {d}")
    ks = [int(k) for k in ks]
    m = len(ks)
    for shift in itertools.product((-1, 0, 1), repeat=m - 1):
        last = -sum(shift)
        if abs(last) > 1 or (not any(shift) and last == 0):
            continue
        new = [k + s for k, s in zip(ks, shift + (last,))]
        if min(new) >= 1:
            yield Belief(tuple(Fraction(k, d) for k in new))


def random_log_concave(rng, m: int, max_den: int = 12) -> Belief:
    """A random strictly positive log-concave belief built from non-increasing likelihood ratios."""
    ratios = sorted(
        (Fraction(rng.randint(1, 4 * max_den), rng.randint(1, max_den)) for _ in range(m - 1)),
        reverse=True,
    )
    weights = [Fraction(1)]
    for rho in ratios:
        weights.append(weights[-1] * rho)
    total = sum(weights, Fraction(0))
    return Belief(tuple(w / total for w in weights))


def as_belief(p) -> Belief:
    if isinstance(p, Belief):
        return p
    if isinstance(p, Iterable):
        return Belief(tuple(p))
    raise DomainError(f"cannot interpret {p!r} as a belief")
