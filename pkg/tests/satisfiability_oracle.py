"""Brute-force satisfiability oracle for conjunctions of two clauses.

Numeric conditions in generated clauses use integer thresholds, so any
non-empty intersection of such conditions contains a point on a half-integer
grid extended one unit beyond the threshold range; enumerating that grid is
therefore an exact oracle for real-valued satisfiability.
"""

from __future__ import annotations

import itertools

import numpy as np

from rulepatch.rules import (
    CATEGORICAL,
    NUMERIC,
    Clause,
    Condition,
    Feature,
    Schema,
    satisfies,
)

NUMERIC_OPS = ("==", "!=", ">", ">=", "<", "<=")
CATEGORICAL_OPS = ("==", "!=")


def oracle_schema() -> Schema:
    return Schema(
        [
            Feature("x", NUMERIC, value_range=(0.0, 12.0)),
            Feature("y", NUMERIC, value_range=(0.0, 8.0)),
            Feature("c", CATEGORICAL, domain=("a", "b", "d")),
            Feature("k", CATEGORICAL, domain=("u", "v", "w", "z", "q")),
        ],
        ("neg", "pos"),
    )


def _axis(feature: Feature) -> list:
    if feature.kind == NUMERIC:
        lo, hi = feature.value_range
        return [float(v) for v in np.arange(lo - 1.0, hi + 1.5, 0.5)]
    return list(feature.domain)


def random_clause(rng: np.random.Generator, schema: Schema) -> Clause:
    conds = []
    for f in schema.features:
        if rng.random() >= 0.55:
            continue
        if f.kind == NUMERIC:
            lo, hi = f.value_range
            conds.append(
                Condition(f.name, str(rng.choice(NUMERIC_OPS)), float(rng.integers(int(lo), int(hi) + 1)))
            )
        else:
            conds.append(Condition(f.name, str(rng.choice(CATEGORICAL_OPS)), str(rng.choice(f.domain))))
    if not conds:
        return random_clause(rng, schema)
    return Clause(conds)


def brute_force_satisfiable(c1: Clause, c2: Clause, schema: Schema) -> bool:
    names = [f.name for f in schema.features]
    axes = [_axis(f) for f in schema.features]
    return any(
        satisfies(c1, x) and satisfies(c2, x)
        for x in (dict(zip(names, combo)) for combo in itertools.product(*axes))
    )
