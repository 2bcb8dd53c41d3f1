"""Input validation helpers in the spirit of ``sklearn.utils.validation``.

Everything in this package works on exact rationals. These helpers coerce
user input (ints, ``Fraction`` objects, ``"num/den"`` or decimal strings)
and refuse binary floats, which cannot represent the type grid exactly.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction
from numbers import Rational

from .exceptions import DomainError


def as_rational(x, name="value") -> Fraction:
    """Coerce ``x`` to a ``Fraction`` without going through floating point."""
    if isinstance(x, bool):
        raise DomainError(f"{name}: booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"{name}: cannot parse {x!r} as a rational") from exc
    if isinstance(x, float):
        raise DomainError(
            f"{name}: got float {x!r}; pass a Fraction, int or 'num/den' string "
            "so the value is exact"
        )
    raise DomainError(f"{name}: unsupported type {type(x).__name__}")


def as_int(x, name="value") -> int:
    r = as_rational(x, name)
    if r.denominator != 1:
        raise DomainError(f"{name}: expected an integer, got {r}")
    return int(r)


def check_rational_vector(values: Iterable, name="values", min_length=1) -> tuple[Fraction, ...]:
    out = tuple(as_rational(v, f"{name}[{k}]") for k, v in enumerate(values))
    if len(out) < min_length:
        raise DomainError(f"{name}: need at least {min_length} entries, got {len(out)}")
    return out


def check_probability_vector(values: Iterable, name="belief") -> tuple[Fraction, ...]:
    """Validate a full-support probability vector that sums to exactly one."""
    probs = check_rational_vector(values, name)
    for k, p in enumerate(probs):
        if p <= 0:
            raise DomainError(f"{name}[{k}] = {p} is not strictly positive (full support required)")
    total = sum(probs, Fraction(0))
    if total != 1:
        raise DomainError(f"{name}: entries sum to {total}, not 1")
    return probs


def check_index(i: int, low: int, high: int, name="index") -> int:
    if isinstance(i, bool) or not isinstance(i, int):
        raise DomainError(f"{name} must be an int, got {type(i).__name__}")
    if not low <= i <= high:
        raise DomainError(f"{name} = {i} outside [{low}, {high}]")
    return i


def check_pairs(pairs: Sequence, name="contracts") -> list[tuple[int, int]]:
    """Validate a sequence of ``(q, t)`` integer pairs."""
    out = []
    for k, pair in enumerate(pairs):
        try:
            q, t = pair
        except (TypeError, ValueError) as exc:
            raise DomainError(f"{name}[{k}]: expected a (q, t) pair, got {pair!r}") from exc
        out.append((as_int(q, f"{name}[{k}].q"), as_int(t, f"{name}[{k}].t")))
    return out


def parallel_map(func, items: Sequence, n_jobs: int = 1) -> list:
    """``[func(x) for x in items]``, via joblib when ``n_jobs != 1`` and it is installed.

    Results keep the input order either way.
    """
    if n_jobs != 1 and len(items) > 1:
        try:
            from joblib import Parallel, delayed
        except ImportError:
            pass
        else:
            return Parallel(n_jobs=n_jobs)(delayed(func)(x) for x in items)
    return [func(x) for x in items]
