"""Per-class DNF rule sets induced from a labeling function.

The built-in inducer is an entropy decision tree whose splits are restricted
so that every root-to-leaf path is exactly expressible as a clause with at
most one condition per variable: a numeric feature is split at most once per
path, and a categorical feature may only be split while the reachable
category set stays representable as a single == or != condition.  Leaf
regions are therefore pairwise disjoint and the extracted DNF classifies
identically to the tree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .rules import (
    CATEGORICAL,
    NUMERIC,
    Clause,
    Condition,
    EMPTY_CLAUSE,
    Instance,
    Schema,
    format_clause,
    parse_clause,
    satisfies,
)

ROLE_ERS = "ERS"
ROLE_PKRS = "PKRS"
ROLE_FKRS = "FKRS"


def _entropy(pos: float, total: float) -> float:
    if total <= 0 or pos <= 0 or pos >= total:
        return 0.0
    p = pos / total
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def _entropy_vec(pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, pos / np.maximum(total, 1e-300), 0.0)
        ent = -(p * np.log2(np.maximum(p, 1e-300)) + (1 - p) * np.log2(np.maximum(1 - p, 1e-300)))
    ent[(p <= 0.0) | (p >= 1.0)] = 0.0
    return ent


@dataclass
class _Leaf:
    label: str
    counts: tuple[int, int]  # (negative, positive)

    @property
    def purity(self) -> float:
        total = sum(self.counts)
        return max(self.counts) / total if total else 0.0


@dataclass
class _Split:
    feature: str
    kind: str
    threshold: float | None  # numeric: value <= threshold goes left
    category: str | None  # categorical: value == category goes left
    left: "_Leaf | _Split"
    right: "_Leaf | _Split"


class DecisionTree:
    """Entropy tree over a schema, constrained to canonical-clause paths."""

    def __init__(self, schema: Schema, max_depth: int | None = 5, min_leaf: int = 1):
        self.schema = schema
        self.max_depth = max_depth
        self.min_leaf = max(1, min_leaf)
        self.root: _Leaf | _Split | None = None

    def fit(self, X: list[Instance], y: list[str]) -> "DecisionTree":
        if not X or len(X) != len(y):
            raise ValueError("need paired non-empty instances and labels")
        cols: dict[str, np.ndarray] = {}
        for f in self.schema.features:
            if f.kind == NUMERIC:
                cols[f.name] = np.array([float(x[f.name]) for x in X])
            else:
                index = {c: i for i, c in enumerate(f.domain)}
                cols[f.name] = np.array([index[x[f.name]] for x in X], dtype=np.int64)
        target = np.array([1 if label == self.schema.positive else 0 for label in y], dtype=np.int64)
        numeric_used: set[str] = set()
        cat_allowed = {
            f.name: frozenset(range(len(f.domain)))
            for f in self.schema.features
            if f.kind == CATEGORICAL
        }
        idx = np.arange(len(X))
        self.root = self._build(cols, target, idx, numeric_used, cat_allowed, depth=0)
        return self

    def _leaf(self, target: np.ndarray, idx: np.ndarray) -> _Leaf:
        pos = int(target[idx].sum())
        neg = len(idx) - pos
        label = self.schema.positive if pos > neg else self.schema.negative
        return _Leaf(label=label, counts=(neg, pos))

    def _build(self, cols, target, idx, numeric_used, cat_allowed, depth) -> "_Leaf | _Split":
        n = len(idx)
        pos = int(target[idx].sum())
        if pos == 0 or pos == n or n < 2 * self.min_leaf:
            return self._leaf(target, idx)
        if self.max_depth is not None and depth >= self.max_depth:
            return self._leaf(target, idx)
        best = self._best_split(cols, target, idx, numeric_used, cat_allowed)
        if best is None:
            return self._leaf(target, idx)
        feature, kind, value, left_mask = best
        left_idx = idx[left_mask]
        right_idx = idx[~left_mask]
        if kind == NUMERIC:
            used = numeric_used | {feature}
            left = self._build(cols, target, left_idx, used, cat_allowed, depth + 1)
            right = self._build(cols, target, right_idx, used, cat_allowed, depth + 1)
            return _Split(feature, NUMERIC, float(value), None, left, right)
        domain = self.schema.feature(feature).domain
        cat_index = domain.index(value)
        left_allowed = dict(cat_allowed)
        left_allowed[feature] = frozenset({cat_index})
        right_allowed = dict(cat_allowed)
        right_allowed[feature] = cat_allowed[feature] - {cat_index}
        left = self._build(cols, target, left_idx, numeric_used, left_allowed, depth + 1)
        right = self._build(cols, target, right_idx, numeric_used, right_allowed, depth + 1)
        return _Split(feature, CATEGORICAL, None, value, left, right)

    def _best_split(self, cols, target, idx, numeric_used, cat_allowed):
        n = len(idx)
        pos = int(target[idx].sum())
        parent = _entropy(pos, n)
        best_gain = 1e-12
        best = None
        for f in self.schema.features:
            col = cols[f.name][idx]
            y = target[idx]
            if f.kind == NUMERIC:
                if f.name in numeric_used:
                    continue
                order = np.argsort(col, kind="stable")
                vals = col[order]
                ys = y[order]
                if vals[0] == vals[-1]:
                    continue
                cum_pos = np.cumsum(ys)
                boundaries = np.nonzero(vals[:-1] < vals[1:])[0]
                if boundaries.size == 0:
                    continue
                n_l = boundaries + 1
                keep = (n_l >= self.min_leaf) & (n - n_l >= self.min_leaf)
                boundaries, n_l = boundaries[keep], n_l[keep]
                if boundaries.size == 0:
                    continue
                pos_l = cum_pos[boundaries].astype(float)
                n_r = (n - n_l).astype(float)
                pos_r = pos - pos_l
                gains = parent - (
                    n_l / n * _entropy_vec(pos_l, n_l.astype(float))
                    + n_r / n * _entropy_vec(pos_r, n_r)
                )
                bi = int(np.argmax(gains))
                if gains[bi] > best_gain:
                    b = boundaries[bi]
                    best_gain = float(gains[bi])
                    best = (f.name, NUMERIC, (vals[b] + vals[b + 1]) / 2.0, None)
            else:
                allowed = cat_allowed[f.name]
                if len(allowed) < 2:
                    continue
                domain = f.domain
                for ci in sorted(allowed):
                    rest = len(allowed) - 1
                    if rest != 1 and rest != len(domain) - 1:
                        continue  # right side not expressible as one condition
                    mask = col == ci
                    n_l = int(mask.sum())
                    if n_l < self.min_leaf or n - n_l < self.min_leaf:
                        continue
                    pos_l = int(y[mask].sum())
                    gain = parent - (
                        n_l / n * _entropy(pos_l, n_l)
                        + (n - n_l) / n * _entropy(pos - pos_l, n - n_l)
                    )
                    if gain > best_gain:
                        best_gain = gain
                        best = (f.name, CATEGORICAL, None, domain[ci])
        if best is None:
            return None
        feature, kind, threshold, category = best
        col = cols[feature][idx]
        if kind == NUMERIC:
            left_mask = col <= threshold
            return feature, kind, threshold, left_mask
        ci = self.schema.feature(feature).domain.index(category)
        return feature, kind, category, col == ci

    def predict(self, x: Instance) -> str:
        node = self.root
        if node is None:
            raise ValueError("tree not fitted")
        while isinstance(node, _Split):
            if node.kind == NUMERIC:
                node = node.left if float(x[node.feature]) <= node.threshold else node.right
            else:
                node = node.left if x[node.feature] == node.category else node.right
        return node.label

    def leaves_with_clauses(self):
        """Yield (clause, leaf) pairs; each clause is the exact leaf region."""
        domains = {
            f.name: f.domain for f in self.schema.features if f.kind == CATEGORICAL
        }

        def recurse(node, numeric_conds: dict, cat_sets: dict):
            if isinstance(node, _Leaf):
                conds = []
                for f in self.schema.features:
                    if f.kind == NUMERIC:
                        if f.name in numeric_conds:
                            conds.append(numeric_conds[f.name])
                    else:
                        allowed = cat_sets.get(f.name)
                        domain = domains[f.name]
                        if allowed is None or len(allowed) == len(domain):
                            continue
                        if len(allowed) == 1:
                            (ci,) = allowed
                            conds.append(Condition(f.name, "==", domain[ci]))
                        elif len(allowed) == len(domain) - 1:
                            (missing,) = set(range(len(domain))) - allowed
                            conds.append(Condition(f.name, "!=", domain[missing]))
                        else:  # pragma: no cover - excluded by split admissibility
                            raise AssertionError("non-canonical category set on a path")
                yield Clause(conds), node
                return
            if node.kind == NUMERIC:
                left_conds = dict(numeric_conds)
                left_conds[node.feature] = Condition(node.feature, "<=", node.threshold)
                yield from recurse(node.left, left_conds, cat_sets)
                right_conds = dict(numeric_conds)
                right_conds[node.feature] = Condition(node.feature, ">", node.threshold)
                yield from recurse(node.right, right_conds, cat_sets)
            else:
                domain = domains[node.feature]
                ci = domain.index(node.category)
                full = frozenset(range(len(domain)))
                current = cat_sets.get(node.feature, full)
                left_sets = dict(cat_sets)
                left_sets[node.feature] = frozenset({ci})
                yield from recurse(node.left, numeric_conds, left_sets)
                right_sets = dict(cat_sets)
                right_sets[node.feature] = current - {ci}
                yield from recurse(node.right, numeric_conds, right_sets)

        yield from recurse(self.root, {}, {})


class RuleSet:
    """Per-class DNF clause lists with a provenance role (ERS/PKRS/FKRS)."""

    def __init__(self, role: str, schema: Schema, clauses_by_label: dict[str, list[Clause]]):
        self.role = role
        self.schema = schema
        self.clauses_by_label = {
            label: list(clauses_by_label.get(label, ())) for label in schema.labels
        }

    def clauses(self, label: str) -> list[Clause]:
        return self.clauses_by_label[self.schema.validate_label(label)]

    def explain(self, x: Instance, label: str) -> list[Clause]:
        """All clauses of the class satisfied by ``x``, in rule-set order."""
        return [c for c in self.clauses(label) if satisfies(c, x)]

    def classify(self, x: Instance) -> Optional[str]:
        """Class of the first matching clause, scanning negative then positive."""
        for label in self.schema.labels:
            for clause in self.clauses_by_label[label]:
                if satisfies(clause, x):
                    return label
        return None

    def accuracy(self, X: list[Instance], y: list[str]) -> float:
        hits = sum(1 for x, label in zip(X, y) if self.classify(x) == label)
        return hits / len(X)

    def to_json(self) -> dict:
        return {
            "role": self.role,
            "classes": {
                label: [format_clause(c) if not c.is_empty else "" for c in clauses]
                for label, clauses in self.clauses_by_label.items()
            },
        }

    @classmethod
    def from_json(cls, obj: dict, schema: Schema) -> "RuleSet":
        clauses_by_label = {}
        for label, texts in obj["classes"].items():
            schema.validate_label(label)
            clauses_by_label[label] = [
                EMPTY_CLAUSE if text == "" else parse_clause(text, schema) for text in texts
            ]
        return cls(obj["role"], schema, clauses_by_label)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)

    @classmethod
    def load(cls, path, schema: Schema) -> "RuleSet":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh), schema)


def induce_rules(
    labeler: Callable[[Instance], str],
    X: list[Instance],
    schema: Schema,
    role: str = ROLE_ERS,
    max_depth: int | None = 5,
    min_leaf: int = 1,
    purity_threshold: float | None = None,
) -> RuleSet:
    """Fit the canonical tree to ``labeler``'s labels on X and extract DNF rules.

    Each majority leaf contributes its path clause to its class; leaves whose
    majority purity falls below ``purity_threshold`` are skipped.  When the
    labeler assigns a single class to all of X, the result is one empty clause
    for that class.
    """
    if not X:
        raise ValueError("cannot induce rules from empty data")
    y = [labeler(x) for x in X]
    distinct = set(y)
    if len(distinct) == 1:
        (only,) = distinct
        return RuleSet(role, schema, {only: [EMPTY_CLAUSE]})
    tree = DecisionTree(schema, max_depth=max_depth, min_leaf=min_leaf).fit(X, y)
    clauses_by_label: dict[str, list[Clause]] = {label: [] for label in schema.labels}
    for clause, leaf in tree.leaves_with_clauses():
        if purity_threshold is not None and leaf.purity < purity_threshold:
            continue
        clauses_by_label[leaf.label].append(clause)
    return RuleSet(role, schema, clauses_by_label)
