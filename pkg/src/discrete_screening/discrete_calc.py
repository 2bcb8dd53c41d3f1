"""Discrete calculus and concave maximization on integer intervals.

Functions are tabulated on ``{0, ..., b}`` as exact rationals. Forward and
backward differences, the mixed second difference, concavity diagnostics,
argmax sets and the sandwich conditions ``fwd(q) <= c <= bwd(q)`` are all
computed without floating point: ties between adjacent maximizers happen
exactly at rational equalities and must not be lost to rounding.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import DomainError, InvariantViolation, PreconditionError
from .validation import as_int, as_rational, check_rational_vector


@dataclass(frozen=True)
class TabulatedFn:
    """Values ``f(0), ..., f(b)`` of a function on ``{0, ..., b}``."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = check_rational_vector(self.values, "values", min_length=1)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, fn: Callable[[int], object], b: int) -> "TabulatedFn":
        if b < 0:
            raise DomainError(f"b must be non-negative, got {b}")
        return cls(tuple(as_rational(fn(q), f"f({q})") for q in range(b + 1)))

    @property
    def b(self) -> int:
        return len(self.values) - 1

    def __call__(self, q: int) -> Fraction:
        if not 0 <= q <= self.b:
            raise DomainError(f"q = {q} outside {{0, ..., {self.b}}}")
        return self.values[q]

    def __len__(self):
        return len(self.values)

    def minus_linear(self, c) -> "TabulatedFn":
        """Return the tabulation of ``q -> f(q) - c*q``."""
        c = as_rational(c, "c")
        return TabulatedFn(tuple(v - c * q for q, v in enumerate(self.values)))


def _check_q(f: TabulatedFn, q: int, low: int, high: int, what: str) -> None:
    if isinstance(q, bool) or not isinstance(q, int):
        raise DomainError(f"{what}: q must be an int, got {type(q).__name__}")
    if not low <= q <= high:
        raise DomainError(f"{what}: q = {q} outside [{low}, {high}] for b = {f.b}")


def forward_diff(f: TabulatedFn, q: int) -> Fraction:
    _check_q(f, q, 0, f.b - 1, "forward_diff")
    return f.values[q + 1] - f.values[q]


def backward_diff(f: TabulatedFn, q: int) -> Fraction:
    _check_q(f, q, 1, f.b, "backward_diff")
    return f.values[q] - f.values[q - 1]


def second_diff(f: TabulatedFn, q: int) -> Fraction:
    """Mixed second difference: the forward difference of the backward differences at ``q``."""
    _check_q(f, q, 1, f.b - 1, "second_diff")
    return backward_diff(f, q + 1) - backward_diff(f, q)


def second_diff_backward_of_forward(f: TabulatedFn, q: int) -> Fraction:
    """The same quantity taken in the other order; kept separate so the two can be compared."""
    _check_q(f, q, 1, f.b - 1, "second_diff_backward_of_forward")
    return forward_diff(f, q) - forward_diff(f, q - 1)


@dataclass(frozen=True)
class ConcavityReport:
    """Structural flags of a tabulated function.

    ``bounded_concavity`` is the lower bound ``second_diff >= -1`` that rules
    out bunching; ``no_integer_forward_diff`` makes the efficient quantity
    unique.
    """

    zero_at_origin: bool
    increasing: bool
    strictly_concave: bool
    bounded_concavity: bool
    no_integer_forward_diff: bool

    @property
    def basic(self) -> bool:
        """Normalization, monotonicity and strict concavity together."""
        return self.zero_at_origin and self.increasing and self.strictly_concave

    @property
    def all_hold(self) -> bool:
        return self.basic and self.bounded_concavity and self.no_integer_forward_diff

    def failures(self) -> list[str]:
        return [name for name, ok in self.as_dict().items() if not ok]

    def as_dict(self) -> dict[str, bool]:
        return {
            "zero_at_origin": self.zero_at_origin,
            "increasing": self.increasing,
            "strictly_concave": self.strictly_concave,
            "bounded_concavity": self.bounded_concavity,
            "no_integer_forward_diff": self.no_integer_forward_diff,
        }


def check_concavity(f: TabulatedFn) -> ConcavityReport:
    b = f.b
    return ConcavityReport(
        zero_at_origin=f.values[0] == 0,
        increasing=all(backward_diff(f, q) > 0 for q in range(1, b + 1)),
        strictly_concave=all(second_diff(f, q) < 0 for q in range(1, b)),
        bounded_concavity=all(second_diff(f, q) >= -1 for q in range(1, b)),
        no_integer_forward_diff=all(forward_diff(f, q).denominator != 1 for q in range(b)),
    )


def is_strictly_concave(f: TabulatedFn) -> bool:
    return all(second_diff(f, q) < 0 for q in range(1, f.b))


def is_local_maximizer(f: TabulatedFn, q: int) -> bool:
    """``f(q)`` is at least as large as each neighbour that exists."""
    _check_q(f, q, 0, f.b, "is_local_maximizer")
    if q > 0 and f.values[q - 1] > f.values[q]:
        return False
    if q < f.b and f.values[q + 1] > f.values[q]:
        return False
    return True


def argmax_scan(f: TabulatedFn) -> frozenset[int]:
    """Full-scan argmax; needs no structure and serves as the reference."""
    best = max(f.values)
    return frozenset(q for q, v in enumerate(f.values) if v == best)


def maximize_concave(f: TabulatedFn) -> frozenset[int]:
    """All global maximizers of a strictly discrete concave tabulation.

    Walks up the forward differences until they stop being positive; an
    exactly zero difference at the stopping point means a second, adjacent
    maximizer. The walk is cross-checked against :func:`argmax_scan`.
    """
    if not is_strictly_concave(f):
        raise PreconditionError("maximize_concave requires a strictly discrete concave function")
    q = 0
    while q < f.b and forward_diff(f, q) > 0:
        q += 1
    result = {q}
    if q < f.b and forward_diff(f, q) == 0:
        result.add(q + 1)
    result = frozenset(result)
    if result != argmax_scan(f):
        raise InvariantViolation(f"maximizer walk {sorted(result)} disagrees with full scan")
    return result


def foc_holds(f: TabulatedFn, q: int, c) -> bool:
    """One-sided-at-the-boundary sandwich ``fwd(q) <= c <= bwd(q)``."""
    c = as_rational(c, "c")
    if q < f.b and forward_diff(f, q) > c:
        return False
    if q > 0 and backward_diff(f, q) < c:
        return False
    return True


def solve_foc(f: TabulatedFn, c) -> frozenset[int]:
    """Quantities satisfying the combined first-order conditions at marginal cost ``c``."""
    c = as_rational(c, "c")
    if c <= 0:
        raise DomainError(f"marginal cost must be positive, got {c}")
    if not is_strictly_concave(f):
        raise PreconditionError("solve_foc requires a strictly discrete concave function")
    result = frozenset(q for q in range(f.b + 1) if foc_holds(f, q, c))
    if not result:
        raise InvariantViolation(f"no quantity satisfies the first-order conditions at c = {c}")
    if len(result) > 2 or (len(result) == 2 and max(result) - min(result) != 1):
        raise InvariantViolation(f"first-order conditions give non-adjacent set {sorted(result)}")
    if result != maximize_concave(f.minus_linear(c)):
        raise InvariantViolation("first-order conditions disagree with the argmax of f(q) - c*q")
    return result


def ceil_rat(x) -> int:
    return math.ceil(as_rational(x, "x"))


def floor_rat(x) -> int:
    return math.floor(as_rational(x, "x"))


def ceil_type_product(j: int, gamma: int, n: int) -> int:
    """``ceil((j - 1/gamma) * n)``, which equals ``j * n`` whenever ``0 <= n < gamma``.

    Raises when ``n >= gamma``: there the identity can fail (``n = gamma``
    already gives ``j*n - 1``).
    """
    j, gamma, n = as_int(j, "j"), as_int(gamma, "gamma"), as_int(n, "n")
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if gamma <= n:
        raise PreconditionError(f"gamma = {gamma} must exceed n = {n} for the rounding identity")
    direct = ceil_rat((j - Fraction(1, gamma)) * n)
    if direct != j * n:
        raise InvariantViolation(f"ceil(({j} - 1/{gamma}) * {n}) = {direct} != {j * n}")
    return j * n


def tabulate(values: Iterable) -> TabulatedFn:
    return TabulatedFn(tuple(values))
