"""Compile rule edits into guarded instance transformations and apply them.

An edited rule is compared against its original clause; each differing
variable yields one guarded reassignment.  Replaying the reassignments on an
instance moves it just inside or just outside the original clause's region so
that the model answers as if the edit had been part of its training data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .rules import (
    CATEGORICAL,
    NUMERIC,
    Clause,
    Condition,
    Instance,
    Rule,
    Schema,
    SchemaError,
    Value,
    complement_operator,
    format_value,
)


class TransformError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Transformation configuration
# ---------------------------------------------------------------------------

DEFAULT_MARGIN = 1.0


class TransformationConfig:
    """Per-feature settings: categorical domain, or numeric margin (default 1)."""

    def __init__(self, entries: dict | None = None):
        self.entries = dict(entries or {})
        for name, entry in self.entries.items():
            if "margin" in entry and entry["margin"] <= 0:
                raise TransformError(f"margin for {name!r} must be positive")

    @classmethod
    def for_schema(cls, schema: Schema, margin: float = DEFAULT_MARGIN) -> "TransformationConfig":
        entries = {}
        for f in schema.features:
            if f.kind == CATEGORICAL:
                entries[f.name] = {"domain": list(f.domain)}
            else:
                entries[f.name] = {"margin": margin}
        return cls(entries)

    def margin(self, feature: str) -> float:
        entry = self.entries.get(feature)
        if entry is None or "margin" not in entry:
            raise TransformError(f"no margin configured for feature {feature!r}")
        return float(entry["margin"])

    def domain(self, feature: str) -> tuple[str, ...]:
        entry = self.entries.get(feature)
        if entry is None or "domain" not in entry:
            raise TransformError(f"no domain configured for feature {feature!r}")
        return tuple(entry["domain"])

    def to_json(self) -> dict:
        return dict(self.entries)

    @classmethod
    def from_json(cls, obj: dict) -> "TransformationConfig":
        return cls(obj)


# ---------------------------------------------------------------------------
# Guards and replacement values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NumericGuard:
    operator: str
    threshold: float

    def matches(self, value: Value) -> bool:
        op, t = self.operator, self.threshold
        if op == "==":
            return value == t
        if op == "!=":
            return value != t
        if op == ">":
            return value > t
        if op == ">=":
            return value >= t
        if op == "<":
            return value < t
        return value <= t

    @property
    def text(self) -> str:
        return f"value {self.operator} {format_value(self.threshold)}"

    def to_json(self) -> dict:
        return {"type": "numeric", "operator": self.operator, "threshold": self.threshold}


@dataclass(frozen=True)
class MembershipGuard:
    values: frozenset
    label: str = ""

    def matches(self, value: Value) -> bool:
        return value in self.values

    @property
    def text(self) -> str:
        return self.label or "value in {" + ", ".join(format_value(v) for v in sorted(self.values)) + "}"

    def to_json(self) -> dict:
        return {"type": "membership", "values": sorted(self.values), "label": self.label}


@dataclass(frozen=True)
class ConstantGuard:
    truth: bool = False

    def matches(self, value: Value) -> bool:
        return self.truth

    @property
    def text(self) -> str:
        return "true" if self.truth else "false"

    def to_json(self) -> dict:
        return {"type": "constant", "truth": self.truth}


NEVER = ConstantGuard(False)

Guard = NumericGuard | MembershipGuard | ConstantGuard


def guard_from_json(obj: dict) -> Guard:
    t = obj["type"]
    if t == "numeric":
        return NumericGuard(obj["operator"], obj["threshold"])
    if t == "membership":
        return MembershipGuard(frozenset(obj["values"]), obj.get("label", ""))
    return ConstantGuard(obj["truth"])


@dataclass(frozen=True)
class FixedValue:
    value: Value

    def resolve(self, rng: np.random.Generator) -> Value:
        return self.value

    @property
    def text(self) -> str:
        return format_value(self.value)

    def to_json(self) -> dict:
        return {"type": "fixed", "value": self.value}


@dataclass(frozen=True)
class DrawFrom:
    choices: tuple

    def resolve(self, rng: np.random.Generator) -> Value:
        return self.choices[int(rng.integers(len(self.choices)))]

    @property
    def text(self) -> str:
        return "random from {" + ", ".join(format_value(c) for c in self.choices) + "}"

    def to_json(self) -> dict:
        return {"type": "draw", "choices": list(self.choices)}


Replacement = FixedValue | DrawFrom


def replacement_from_json(obj: dict | None) -> Optional[Replacement]:
    if obj is None:
        return None
    if obj["type"] == "fixed":
        return FixedValue(obj["value"])
    return DrawFrom(tuple(obj["choices"]))


@dataclass(frozen=True)
class GuardedAssignment:
    """One per-feature action: first matching guard wins, else no change."""

    feature: str
    guard_1: Guard
    value_1: Optional[Replacement]
    guard_2: Guard
    value_2: Optional[Replacement]

    @property
    def description(self) -> str:
        parts = []
        if not isinstance(self.guard_1, ConstantGuard) or self.guard_1.truth:
            parts.append(f"if {self.guard_1.text} then {self.feature} := {self.value_1.text}")
        if self.value_2 is not None and (not isinstance(self.guard_2, ConstantGuard) or self.guard_2.truth):
            kw = "else if" if parts else "if"
            parts.append(f"{kw} {self.guard_2.text} then {self.feature} := {self.value_2.text}")
        return " ".join(parts)

    def apply(self, values: dict, rng: np.random.Generator) -> None:
        v = values[self.feature]
        if self.guard_1.matches(v) and self.value_1 is not None:
            values[self.feature] = self.value_1.resolve(rng)
        elif self.guard_2.matches(v) and self.value_2 is not None:
            values[self.feature] = self.value_2.resolve(rng)

    def to_json(self) -> dict:
        return {
            "feature": self.feature,
            "guard_1": self.guard_1.to_json(),
            "value_1": self.value_1.to_json() if self.value_1 else None,
            "guard_2": self.guard_2.to_json(),
            "value_2": self.value_2.to_json() if self.value_2 else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GuardedAssignment":
        return cls(
            feature=obj["feature"],
            guard_1=guard_from_json(obj["guard_1"]),
            value_1=replacement_from_json(obj["value_1"]),
            guard_2=guard_from_json(obj["guard_2"]),
            value_2=replacement_from_json(obj["value_2"]),
        )


class TransformationFunction:
    """Ordered guarded reassignments over pairwise-distinct features."""

    def __init__(self, actions: list[GuardedAssignment]):
        feats = [a.feature for a in actions]
        if len(set(feats)) != len(feats):
            raise TransformError("at most one action per feature")
        self.actions = tuple(actions)

    @property
    def is_identity(self) -> bool:
        return not self.actions

    @property
    def description(self) -> str:
        return "; ".join(a.description for a in self.actions if a.description)

    def to_json(self) -> dict:
        return {"actions": [a.to_json() for a in self.actions], "description": self.description}

    @classmethod
    def from_json(cls, obj: dict) -> "TransformationFunction":
        return cls([GuardedAssignment.from_json(a) for a in obj["actions"]])


IDENTITY = TransformationFunction([])


# ---------------------------------------------------------------------------
# Diff
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiteralDiff:
    """map_1: literals only in the original clause; map_2: only in the edited one."""

    map_1: dict[str, Condition]
    map_2: dict[str, Condition]


def diff_function(e: Clause, e_prime: Clause) -> LiteralDiff:
    """Set difference on whole (variable, operator, value) triples, keyed by variable."""
    lits_1 = set(e.conditions)
    lits_2 = set(e_prime.conditions)
    map_1 = {c.variable: c for c in e.conditions if c not in lits_2}
    map_2 = {c.variable: c for c in e_prime.conditions if c not in lits_1}
    return LiteralDiff(map_1, map_2)


# ---------------------------------------------------------------------------
# Action construction
# ---------------------------------------------------------------------------


def _outside_witness(lit: Condition, margin: float) -> float:
    """A numeric value that violates ``lit``."""
    v = float(lit.value)
    op = lit.operator
    if op in (">", ">="):
        return v - margin
    if op in ("<", "<="):
        return v + margin
    if op == "==":
        return v + margin
    return v  # != : the excluded point itself


def _inside_witness(lit: Condition, margin: float, other_boundary: float | None = None) -> float:
    """A numeric value that satisfies ``lit``.

    For inequalities the witness sits ``margin`` beyond the boundary; when the
    edited literal's boundary is supplied, the further of the two boundaries is
    used so the witness stays inside the original region regardless of which
    side the edit moved the threshold to.
    """
    v = float(lit.value)
    op = lit.operator
    if op in (">", ">="):
        base = v if other_boundary is None else max(v, other_boundary)
        return base + margin
    if op in ("<", "<="):
        base = v if other_boundary is None else min(v, other_boundary)
        return base - margin
    if op == "==":
        return v
    return v + margin  # != : anything off the excluded point


def _nonstrict_complement(op: str) -> str:
    comp = complement_operator(op)
    return {"<": "<=", ">": ">="}.get(comp, comp)


def _satisfying_set(lit: Condition, domain: tuple[str, ...]) -> set:
    if lit.value not in domain:
        raise TransformError(f"value {lit.value!r} outside configured domain of {lit.variable!r}")
    if lit.operator == "==":
        return {lit.value}
    return set(domain) - {lit.value}


def _categorical_witness(lit: Condition, domain: tuple[str, ...]) -> str:
    """Deterministic representative of the literal's satisfying set."""
    if lit.operator == "==":
        return str(lit.value)
    for cat in domain:
        if cat != lit.value:
            return cat
    raise TransformError(f"domain of {lit.variable!r} too small")


def _membership(values: set, label: str = "") -> Guard:
    if not values:
        return NEVER
    return MembershipGuard(frozenset(values), label)


def _draw_outside(sat: set, domain: tuple[str, ...]) -> DrawFrom:
    outside = tuple(c for c in domain if c not in sat)
    if not outside:
        raise TransformError("no category outside the literal's satisfying set")
    return DrawFrom(outside)


def build_action(
    lit_1: Condition,
    lit_2: Condition | None,
    var_config: dict,
    label_changed: bool,
    kind: str,
) -> GuardedAssignment:
    """Build the guarded reassignment for one differing variable.

    ``lit_1`` comes from the original explanation clause, ``lit_2`` from the
    edited clause (absent for a deleted literal).  When the label is preserved
    the action keeps the original clause's truth value in lock-step with the
    edited clause's; when the label changed it inverts it.
    """
    feature = lit_1.variable
    if kind == NUMERIC:
        margin = float(var_config["margin"])
        if margin <= 0:
            raise TransformError(f"margin for {feature!r} must be positive")
        if lit_2 is None:
            if not label_changed:
                guard_1: Guard = NEVER
                value_1 = None
                guard_2: Guard = NumericGuard(_nonstrict_complement(lit_1.operator), float(lit_1.value))
                value_2: Optional[Replacement] = FixedValue(_inside_witness(lit_1, margin))
            else:
                guard_1 = NumericGuard(lit_1.operator, float(lit_1.value))
                value_1 = FixedValue(_outside_witness(lit_1, margin))
                guard_2, value_2 = NEVER, None
        elif not label_changed:
            guard_1 = NumericGuard(complement_operator(lit_2.operator), float(lit_2.value))
            value_1 = FixedValue(_outside_witness(lit_1, margin))
            guard_2 = NumericGuard(_nonstrict_complement(lit_1.operator), float(lit_1.value))
            value_2 = FixedValue(_inside_witness(lit_1, margin, other_boundary=float(lit_2.value)))
        else:
            guard_1 = NumericGuard(lit_2.operator, float(lit_2.value))
            value_1 = FixedValue(_outside_witness(lit_1, margin))
            guard_2 = NumericGuard(complement_operator(lit_1.operator), float(lit_1.value))
            value_2 = FixedValue(_inside_witness(lit_1, margin))
        return GuardedAssignment(feature, guard_1, value_1, guard_2, value_2)

    # categorical
    domain = tuple(var_config["domain"])
    sat_1 = _satisfying_set(lit_1, domain)
    if lit_2 is None:
        if not label_changed:
            guard_1, value_1 = NEVER, None
            guard_2 = _membership(set(domain) - sat_1)
            value_2 = FixedValue(_categorical_witness(lit_1, domain))
        else:
            guard_1 = _membership(sat_1, f"value {lit_1.operator} {format_value(lit_1.value)}")
            value_1 = _draw_outside(sat_1, domain)
            guard_2, value_2 = NEVER, None
        return GuardedAssignment(feature, guard_1, value_1, guard_2, value_2)

    sat_2 = _satisfying_set(lit_2, domain)
    lit_2_text = f"value {lit_2.operator} {format_value(lit_2.value)}"
    if not label_changed:
        guard_1 = _membership(sat_2, lit_2_text)
        value_1 = FixedValue(_categorical_witness(lit_1, domain))
        guard_2 = _membership(sat_1 - sat_2)
        value_2 = _draw_outside(sat_1, domain) if sat_1 - sat_2 else None
    else:
        guard_1 = _membership(sat_2, lit_2_text)
        value_1 = _draw_outside(sat_1, domain)
        remainder = set(domain) - sat_2 - sat_1
        guard_2 = _membership(remainder)
        value_2 = FixedValue(_categorical_witness(lit_1, domain)) if remainder else None
    return GuardedAssignment(feature, guard_1, value_1, guard_2, value_2)


def build_transformation(
    original: Rule,
    corrected: Rule,
    t_config: TransformationConfig,
    schema: Schema,
) -> TransformationFunction:
    """Compile the difference between an explanation rule and its edit.

    Variables present in both diff maps yield a two-literal action; variables
    only in the original clause (deleted literals) yield a deleted-literal
    action; literals added by the edit yield no action.
    """
    original.validate(schema)
    corrected.validate(schema)
    diff = diff_function(original.clause, corrected.clause)
    label_changed = original.label != corrected.label
    actions = []
    for variable in sorted(set(diff.map_1)):
        lit_1 = diff.map_1[variable]
        lit_2 = diff.map_2.get(variable)
        kind = schema.feature(variable).kind
        entry = t_config.entries.get(variable)
        if entry is None:
            raise TransformError(f"no transformation config entry for feature {variable!r}")
        actions.append(build_action(lit_1, lit_2, entry, label_changed, kind))
    return TransformationFunction(actions)


def apply_transformation(
    x: Instance,
    t: TransformationFunction,
    rng: np.random.Generator | None = None,
) -> dict:
    """Apply the actions in order to a copy of ``x``; the input is never mutated."""
    if rng is None:
        rng = np.random.default_rng(0)
    out = dict(x)
    for action in t.actions:
        if action.feature not in out:
            raise SchemaError(f"instance lacks feature {action.feature!r}")
        action.apply(out, rng)
    return out
