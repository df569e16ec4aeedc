"""Typed feature schemas, conditions, clauses, rules and exact conflict checks.

A clause is a conjunction of at most one condition per variable.  The empty
clause is representable (it satisfies every instance) but not parseable: it is
only constructed programmatically, e.g. for complementary feedback entries.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

Value = Union[float, int, str]
Instance = Mapping[str, Value]

NUMERIC = "numeric"
CATEGORICAL = "categorical"

OPERATORS = ("==", "!=", ">", ">=", "<", "<=")
CATEGORICAL_OPERATORS = ("==", "!=")

_COMPLEMENT = {"==": "!=", "!=": "==", ">": "<=", ">=": "<", "<": ">=", "<=": ">"}


class SchemaError(ValueError):
    """Raised when a condition, clause or instance does not fit the schema."""


class ParseError(ValueError):
    """Raised on malformed clause text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str
    domain: tuple[str, ...] | None = None
    value_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaError(f"unknown feature kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.domain:
                raise SchemaError(f"categorical feature {self.name!r} needs a domain")
            if len(set(self.domain)) != len(self.domain):
                raise SchemaError(f"duplicate categories in domain of {self.name!r}")


class Schema:
    """Feature list plus the two task labels (negative first, positive second)."""

    def __init__(self, features: Iterable[Feature], labels: tuple[str, str]):
        self.features = tuple(features)
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique")
        if len(labels) != 2 or labels[0] == labels[1]:
            raise SchemaError("exactly two distinct labels required")
        self.labels = (str(labels[0]), str(labels[1]))
        self._by_name = {f.name: f for f in self.features}

    @property
    def negative(self) -> str:
        return self.labels[0]

    @property
    def positive(self) -> str:
        return self.labels[1]

    def other_label(self, label: str) -> str:
        if label == self.labels[0]:
            return self.labels[1]
        if label == self.labels[1]:
            return self.labels[0]
        raise SchemaError(f"unknown label {label!r}")

    def feature(self, name: str) -> Feature:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaError(f"unknown feature {name!r}") from None

    def validate_label(self, label: str) -> str:
        if label not in self.labels:
            raise SchemaError(f"unknown label {label!r}")
        return label

    def validate_instance(self, x: Instance) -> None:
        if set(x) != set(self._by_name):
            missing = set(self._by_name) - set(x)
            extra = set(x) - set(self._by_name)
            raise SchemaError(f"instance keys mismatch (missing={sorted(missing)}, extra={sorted(extra)})")
        for f in self.features:
            v = x[f.name]
            if f.kind == NUMERIC:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise SchemaError(f"feature {f.name!r} expects a number, got {v!r}")
            else:
                if not isinstance(v, str) or v not in f.domain:
                    raise SchemaError(f"feature {f.name!r} expects a category from its domain, got {v!r}")

    def to_json(self) -> dict:
        feats = []
        for f in self.features:
            d: dict = {"name": f.name, "kind": f.kind}
            if f.domain is not None:
                d["domain"] = list(f.domain)
            if f.value_range is not None:
                d["range"] = list(f.value_range)
            feats.append(d)
        return {"features": feats, "labels": list(self.labels)}

    @classmethod
    def from_json(cls, obj: dict) -> "Schema":
        feats = [
            Feature(
                name=f["name"],
                kind=f["kind"],
                domain=tuple(f["domain"]) if f.get("domain") else None,
                value_range=tuple(f["range"]) if f.get("range") else None,
            )
            for f in obj["features"]
        ]
        return cls(feats, tuple(obj["labels"]))

    @classmethod
    def load(cls, path) -> "Schema":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)


@dataclass(frozen=True)
class Condition:
    variable: str
    operator: str
    value: Value

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise SchemaError(f"unknown operator {self.operator!r}")

    def validate(self, schema: Schema) -> None:
        f = schema.feature(self.variable)
        if f.kind == CATEGORICAL:
            if self.operator not in CATEGORICAL_OPERATORS:
                raise SchemaError(f"operator {self.operator!r} not allowed on categorical {self.variable!r}")
            if not isinstance(self.value, str) or self.value not in f.domain:
                raise SchemaError(f"value {self.value!r} not in domain of {self.variable!r}")
        else:
            if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
                raise SchemaError(f"numeric condition on {self.variable!r} needs a numeric value")


def evaluate_condition(cond: Condition, x: Instance) -> bool:
    """Truth value of ``x[variable] operator value``; comparisons are exact."""
    try:
        v = x[cond.variable]
    except KeyError:
        raise SchemaError(f"unknown feature {cond.variable!r}") from None
    op, ref = cond.operator, cond.value
    if op == "==":
        return v == ref
    if op == "!=":
        return v != ref
    if op == ">":
        return v > ref
    if op == ">=":
        return v >= ref
    if op == "<":
        return v < ref
    return v <= ref


class Clause:
    """Conjunction of conditions, at most one per variable.

    Equality and hashing are canonical: condition order is normalized by
    variable name, so parsed, constructed and deserialized clauses compare
    structurally.
    """

    __slots__ = ("conditions", "_key")

    def __init__(self, conditions: Iterable[Condition] = ()):
        conds = tuple(conditions)
        seen = set()
        for c in conds:
            if c.variable in seen:
                raise SchemaError(f"duplicate condition on variable {c.variable!r}")
            seen.add(c.variable)
        object.__setattr__(self, "conditions", conds)
        object.__setattr__(self, "_key", tuple(sorted(((c.variable, c.operator, c.value) for c in conds))))

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("Clause is immutable")

    def __eq__(self, other):
        return isinstance(other, Clause) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Clause({format_clause(self)!r})" if self.conditions else "Clause(<empty>)"

    def __len__(self):
        return len(self.conditions)

    @property
    def is_empty(self) -> bool:
        return not self.conditions

    def condition_for(self, variable: str) -> Condition | None:
        for c in self.conditions:
            if c.variable == variable:
                return c
        return None

    def validate(self, schema: Schema) -> None:
        for c in self.conditions:
            c.validate(schema)


EMPTY_CLAUSE = Clause()


@dataclass(frozen=True)
class Rule:
    clause: Clause
    label: str

    def validate(self, schema: Schema) -> None:
        self.clause.validate(schema)
        schema.validate_label(self.label)


def satisfies(clause: Clause, x: Instance) -> bool:
    """Conjunction over the clause's conditions; the empty clause holds vacuously."""
    return all(evaluate_condition(c, x) for c in clause.conditions)


def complement_operator(op: str) -> str:
    return _COMPLEMENT[op]


# ---------------------------------------------------------------------------
# Satisfiability / conflict
# ---------------------------------------------------------------------------

_INF = float("inf")


def _numeric_pair_satisfiable(conds: list[Condition]) -> bool:
    # Intersect as intervals over the reals; a numeric != only punches a
    # one-point hole, which empties the set only when the interval is that point.
    lo, lo_strict = -_INF, False
    hi, hi_strict = _INF, False
    holes = set()
    pins = []
    for c in conds:
        v = float(c.value)
        if c.operator == ">":
            if v > lo or (v == lo and not lo_strict):
                lo, lo_strict = v, True
        elif c.operator == ">=":
            if v > lo:
                lo, lo_strict = v, False
        elif c.operator == "<":
            if v < hi or (v == hi and not hi_strict):
                hi, hi_strict = v, True
        elif c.operator == "<=":
            if v < hi:
                hi, hi_strict = v, False
        elif c.operator == "!=":
            holes.add(v)
        else:
            pins.append(v)
    if pins:
        if len(set(pins)) > 1:
            return False
        p = pins[0]
        if p in holes:
            return False
        if p < lo or (p == lo and lo_strict) or p > hi or (p == hi and hi_strict):
            return False
        return True
    if lo > hi:
        return False
    if lo == hi:
        return not (lo_strict or hi_strict) and lo not in holes
    # Non-degenerate real interval: holes cannot empty it.
    return True


def _categorical_pair_satisfiable(conds: list[Condition], domain: tuple[str, ...]) -> bool:
    allowed = set(domain)
    for c in conds:
        if c.operator == "==":
            allowed &= {c.value}
        else:
            allowed -= {c.value}
    return bool(allowed)


def clause_conjunction_satisfiable(c1: Clause, c2: Clause, schema: Schema) -> bool:
    """Exact decision: does some instance satisfy both clauses?

    Decided per feature under the one-condition-per-variable canon: numeric
    conditions intersect as intervals over the reals, categorical ones as
    subset constraints over the domain.
    """
    c1.validate(schema)
    c2.validate(schema)
    by_var: dict[str, list[Condition]] = {}
    for c in list(c1.conditions) + list(c2.conditions):
        by_var.setdefault(c.variable, []).append(c)
    for var, conds in by_var.items():
        f = schema.feature(var)
        if f.kind == NUMERIC:
            if not _numeric_pair_satisfiable(conds):
                return False
        else:
            if not _categorical_pair_satisfiable(conds, f.domain):
                return False
    return True


def rules_conflict(r1: Rule, r2: Rule, schema: Schema) -> bool:
    """True iff the rules carry different labels and their clauses can co-fire."""
    r1.validate(schema)
    r2.validate(schema)
    if r1.label == r2.label:
        return False
    return clause_conjunction_satisfiable(r1.clause, r2.clause, schema)


# ---------------------------------------------------------------------------
# Clause text grammar
# ---------------------------------------------------------------------------
#   clause := cond (" AND " cond)*
#   cond   := NAME OP value
#   OP     := "==" | "!=" | ">" | ">=" | "<" | "<="
# Categorical values are double-quoted, numeric values are decimal literals.

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_OP_RE = re.compile(r"==|!=|>=|<=|>|<")
_NUM_RE = re.compile(r"-?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?")
_STR_RE = re.compile(r'"([^"]*)"')


def format_value(value: Value) -> str:
    if isinstance(value, str):
        return f'"{value}"'
    return repr(float(value))


def format_condition(cond: Condition) -> str:
    return f"{cond.variable} {cond.operator} {format_value(cond.value)}"


def format_clause(clause: Clause) -> str:
    if clause.is_empty:
        raise ValueError("the empty clause has no text form")
    return " AND ".join(format_condition(c) for c in clause.conditions)


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in " \t":
        pos += 1
    return pos


def parse_clause(text: str, schema: Schema) -> Clause:
    """Parse clause text against a schema; raises ParseError/SchemaError."""
    if not text or not text.strip():
        raise ParseError("empty clause text", 0)
    conditions = []
    pos = _skip_ws(text, 0)
    while True:
        m = _NAME_RE.match(text, pos)
        if not m:
            raise ParseError("expected feature name", pos)
        name = m.group(0)
        feature = schema.feature(name)  # raises SchemaError on unknown feature
        pos = _skip_ws(text, m.end())
        m = _OP_RE.match(text, pos)
        if not m:
            raise ParseError("expected comparison operator", pos)
        op = m.group(0)
        pos = _skip_ws(text, m.end())
        if feature.kind == CATEGORICAL:
            m = _STR_RE.match(text, pos)
            if not m:
                raise ParseError(f"expected quoted category for {name!r}", pos)
            value: Value = m.group(1)
        else:
            m = _NUM_RE.match(text, pos)
            if not m:
                raise ParseError(f"expected numeric literal for {name!r}", pos)
            value = float(m.group(0))
        cond = Condition(name, op, value)
        cond.validate(schema)
        conditions.append(cond)
        pos = _skip_ws(text, m.end())
        if pos >= len(text):
            break
        if not text.startswith("AND", pos):
            raise ParseError("expected 'AND' or end of clause", pos)
        pos = _skip_ws(text, pos + 3)
    try:
        return Clause(conditions)
    except SchemaError as exc:
        raise ParseError(str(exc), 0) from exc
