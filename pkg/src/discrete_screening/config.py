"""JSON instance and menu files.

Rationals are written as strings (``"1/3"``, ``"-1/2"``, ``"7"``) so that
files round-trip exactly. An instance file looks like::

    {"b": 50, "m": 3, "gamma": 100, "transfer_bound": 150,
     "value_fn": {"kind": "quadratic", "linear": "50", "quad": "-1/2"},
     "belief": ["1/3", "1/3", "1/3"]}

``value_fn`` may instead be ``{"kind": "table", "values": ["0", "5/2", ...]}``.
A menu file is a list of ``[q, t]`` pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .beliefs import Belief, format_rational
from .exceptions import DomainError
from .model import Menu, TypeSpace, ValueFunction
from .validation import as_int, as_rational, check_pairs


class ConfigError(DomainError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


@dataclass(frozen=True)
class Instance:
    v: ValueFunction
    T: TypeSpace
    p: Belief | None
    spec: dict

    def to_dict(self) -> dict:
        return self.spec


def _read_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, line=e.lineno) from None


def _field(d: dict, name: str, convert, required=True):
    if name not in d:
        if required:
            raise ConfigError("missing", field=name)
        return None
    try:
        return convert(d[name])
    except (DomainError, ValueError, TypeError) as e:
        raise ConfigError(str(e), field=name) from None


def _value_fn(spec, b: int) -> ValueFunction:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("expected an object with a 'kind'", field="value_fn")
    kind = spec["kind"]
    if kind == "quadratic":
        a = _field(spec, "linear", lambda x: as_rational(x, "linear"))
        c = _field(spec, "quad", lambda x: as_rational(x, "quad"))
        return ValueFunction.quadratic(a, c, b)
    if kind == "table":
        values = _field(spec, "values", lambda xs: [as_rational(x, "values") for x in xs])
        if len(values) != b + 1:
            raise ConfigError(f"need b + 1 = {b + 1} values, got {len(values)}", field="value_fn.values")
        return ValueFunction.from_values(values)
    raise ConfigError(f"unknown kind {kind!r}", field="value_fn.kind")


def instance_from_dict(d: dict) -> Instance:
    if not isinstance(d, dict):
        raise ConfigError("top level must be an object")
    b = _field(d, "b", lambda x: as_int(x, "b"))
    m = _field(d, "m", lambda x: as_int(x, "m"))
    gamma = _field(d, "gamma", lambda x: as_int(x, "gamma"))
    tb = _field(d, "transfer_bound", lambda x: as_int(x, "transfer_bound"), required=False)
    try:
        T = TypeSpace(m, gamma, b, tb)
    except DomainError as e:
        raise ConfigError(str(e)) from None
    if "value_fn" not in d:
        raise ConfigError("missing", field="value_fn")
    v = _value_fn(d["value_fn"], b)
    p = _field(d, "belief", Belief.from_strings, required=False)
    if p is not None and p.m != m:
        raise ConfigError(f"belief has {p.m} entries, expected m = {m}", field="belief")
    return Instance(v, T, p, d)


def load_instance(path) -> Instance:
    return instance_from_dict(_read_json(path))


def instance_to_dict(v: ValueFunction, T: TypeSpace, p: Belief | None = None) -> dict:
    d = {"b": T.b, "m": T.m, "gamma": T.gamma}
    if T.transfer_bound is not None:
        d["transfer_bound"] = T.transfer_bound
    d["value_fn"] = {"kind": "table", "values": [format_rational(x) for x in v.table.values]}
    if p is not None:
        d["belief"] = p.to_strings()
    return d


def menu_from_json(data) -> Menu:
    try:
        pairs = check_pairs(data, "menu")
        return Menu.of(*pairs)
    except (DomainError, ValueError, TypeError) as e:
        raise ConfigError(str(e), field="menu") from None


def load_menu(path) -> Menu:
    return menu_from_json(_read_json(path))


def menu_to_json(M: Menu) -> list[list[int]]:
    return [[c.q, c.t] for c in M]
