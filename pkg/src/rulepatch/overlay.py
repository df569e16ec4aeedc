"""User modification layer: feedback rule storage, retrieval and evaluation.

Stored feedback rules are keyed by (explanation clause, prediction label).
Complementary entries, which record a correction with no originating
explanation, behave as if keyed by the empty clause and are scanned in the
second lookup phase.  Insertion rejects any corrected rule that conflicts
with a previously stored one, keeping the table conflict-free.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .explain import RuleSet
from .model import FittedClassifier
from .rules import Clause, EMPTY_CLAUSE, Instance, Rule, Schema, format_clause, parse_clause, rules_conflict, satisfies
from .transform import (
    IDENTITY,
    TransformationConfig,
    TransformationFunction,
    apply_transformation,
    build_transformation,
)


class FeedbackError(ValueError):
    pass


class ConflictError(FeedbackError):
    def __init__(self, conflicting_id: str):
        super().__init__(f"corrected rule conflicts with stored feedback rule {conflicting_id}")
        self.conflicting_id = conflicting_id


@dataclass(frozen=True)
class FeedbackRule:
    id: str
    original: Optional[Rule]
    corrected: Rule
    transformation: Optional[TransformationFunction]
    seq: int

    @property
    def is_complementary(self) -> bool:
        return self.original is None

    def to_json(self) -> dict:
        obj: dict = {
            "id": self.id,
            "corrected": {
                "clause": format_clause(self.corrected.clause),
                "label": self.corrected.label,
            },
            "seq": self.seq,
        }
        if self.original is not None:
            obj["original"] = {
                "clause": format_clause(self.original.clause) if not self.original.clause.is_empty else "",
                "label": self.original.label,
            }
        if self.transformation is not None:
            obj["transformation"] = self.transformation.to_json()
        return obj

    @classmethod
    def from_json(cls, obj: dict, schema: Schema) -> "FeedbackRule":
        original = None
        if "original" in obj:
            text = obj["original"]["clause"]
            clause = EMPTY_CLAUSE if text == "" else parse_clause(text, schema)
            original = Rule(clause, obj["original"]["label"])
        t = TransformationFunction.from_json(obj["transformation"]) if "transformation" in obj else None
        corrected = Rule(parse_clause(obj["corrected"]["clause"], schema), obj["corrected"]["label"])
        return cls(obj["id"], original, corrected, t, obj["seq"])


@dataclass(frozen=True)
class Response:
    """Outcome of a prediction with the overlay consulted.

    ``hc_prediction`` follows the user label whenever one applies;
    ``sc_prediction`` is the model's answer on the transformed instance when a
    transformation fired, else the raw prediction.
    """

    model_prediction: str
    sc_prediction: str
    hc_prediction: str
    user_label: Optional[str] = None
    explanation: Optional[Clause] = None
    transformation_description: Optional[str] = None
    feedback_rule_id: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "prediction": self.model_prediction,
            "sc_prediction": self.sc_prediction,
            "hc_prediction": self.hc_prediction,
            "user_label": self.user_label,
            "explanation": (
                format_clause(self.explanation)
                if self.explanation is not None and not self.explanation.is_empty
                else ("" if self.explanation is not None else None)
            ),
            "transformation_description": self.transformation_description,
            "feedback_rule_id": self.feedback_rule_id,
        }


class FeedbackLookupTable:
    """Insertion-ordered feedback rules, keyed entries first, then complementary."""

    def __init__(self, schema: Schema):
        self.schema = schema
        self._keyed: dict[tuple[Clause, str], list[FeedbackRule]] = {}
        self._complementary: list[FeedbackRule] = []
        self._seq = 0
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return sum(len(v) for v in self._keyed.values()) + len(self._complementary)

    def all_rules(self) -> list[FeedbackRule]:
        rules = [fr for frs in self._keyed.values() for fr in frs] + list(self._complementary)
        return sorted(rules, key=lambda fr: fr.seq)

    def candidates_for(self, clause: Clause, label: str) -> list[FeedbackRule]:
        return list(self._keyed.get((clause, label), ()))

    def keyed_entries(self) -> list[tuple[Clause, str, list[FeedbackRule]]]:
        return [(c, p, list(frs)) for (c, p), frs in self._keyed.items()]

    def complementary_entries(self) -> list[FeedbackRule]:
        return list(self._complementary)

    def add(
        self,
        corrected: Rule,
        original: Optional[Rule] = None,
        t_config: Optional[TransformationConfig] = None,
    ) -> FeedbackRule:
        """Store a feedback rule, building its transformation when keyed.

        Raises ConflictError if the corrected rule conflicts with any stored
        corrected rule; raises FeedbackError on an unmodified rule.
        """
        corrected.validate(self.schema)
        if original is not None:
            original.validate(self.schema)
            if original == corrected:
                raise FeedbackError("corrected rule must differ from the original")
        with self._lock:
            for fr in self.all_rules():
                if rules_conflict(corrected, fr.corrected, self.schema):
                    raise ConflictError(fr.id)
            transformation = None
            if original is not None:
                cfg = t_config or TransformationConfig.for_schema(self.schema)
                transformation = build_transformation(original, corrected, cfg, self.schema)
            fr = FeedbackRule(
                id=f"fr-{self._seq}",
                original=original,
                corrected=corrected,
                transformation=transformation,
                seq=self._seq,
            )
            self._seq += 1
            if original is not None:
                self._keyed.setdefault((original.clause, original.label), []).append(fr)
            else:
                self._complementary.append(fr)
            return fr

    def clone(self) -> "FeedbackLookupTable":
        """Shallow copy for trial evaluations; rules are immutable values."""
        with self._lock:
            other = FeedbackLookupTable(self.schema)
            other._keyed = {key: list(frs) for key, frs in self._keyed.items()}
            other._complementary = list(self._complementary)
            other._seq = self._seq
            return other

    def remove(self, rule_id: str) -> bool:
        with self._lock:
            for key, frs in list(self._keyed.items()):
                kept = [fr for fr in frs if fr.id != rule_id]
                if len(kept) != len(frs):
                    if kept:
                        self._keyed[key] = kept
                    else:
                        del self._keyed[key]
                    return True
            kept = [fr for fr in self._complementary if fr.id != rule_id]
            if len(kept) != len(self._complementary):
                self._complementary = kept
                return True
        return False

    def save_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for fr in self.all_rules():
                fh.write(json.dumps(fr.to_json()) + "\n")

    @classmethod
    def load_jsonl(cls, path, schema: Schema) -> "FeedbackLookupTable":
        table = cls(schema)
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                fr = FeedbackRule.from_json(json.loads(line), schema)
                if fr.original is not None:
                    table._keyed.setdefault((fr.original.clause, fr.original.label), []).append(fr)
                else:
                    table._complementary.append(fr)
                table._seq = max(table._seq, fr.seq + 1)
        return table


def get_other_label(schema: Schema, label: str) -> str:
    return schema.other_label(label)


def evaluate_feedback_rules(
    x: Instance,
    key_clause: Clause,
    p: str,
    candidates: list[FeedbackRule],
    model: FittedClassifier,
    rng: np.random.Generator,
    boundary_flip: bool = True,
) -> tuple[Optional[Response], bool]:
    """Evaluate candidates in order; returns (response, confirmed).

    By default a candidate applies when x satisfies its corrected clause or
    the key clause (boundary-straddling admission); in the straddled region —
    x inside the original boundary but outside the corrected one — the
    corrected label is inverted, treating the edit as a statement that the
    region no longer carries that label.  With ``boundary_flip`` disabled, a
    candidate applies only when x satisfies its corrected clause, so stored
    corrections answer exactly the region they describe; the simulation
    harness relies on this strict mode.

    When the working label disagrees with the model, the stored
    transformation is applied (identity when absent) and the model
    re-queried; the response is confirmed when the re-query agrees with the
    working label.
    """
    schema = model.schema
    last: Optional[Response] = None
    for fr in candidates:
        e_prime = fr.corrected.clause
        p_prime = fr.corrected.label
        sat_e_prime = satisfies(e_prime, x)
        if not sat_e_prime:
            if not (boundary_flip and satisfies(key_clause, x)):
                continue
            p_prime = schema.other_label(p_prime)
        if p != p_prime:
            t = fr.transformation or IDENTITY
            x_t = apply_transformation(x, t, rng)
            new_p = model.predict(x_t)
            last = Response(
                model_prediction=p,
                sc_prediction=new_p,
                hc_prediction=p_prime,
                user_label=p_prime,
                explanation=e_prime,
                transformation_description=t.description,
                feedback_rule_id=fr.id,
            )
            if new_p == p_prime:
                return last, True
        else:
            # model is already capturing this rule
            return (
                Response(
                    model_prediction=p,
                    sc_prediction=p,
                    hc_prediction=p_prime,
                    user_label=p_prime,
                    explanation=e_prime,
                    feedback_rule_id=fr.id,
                ),
                True,
            )
    return last, False


class Overlay:
    """Model + explainer rule set + feedback table, answering as one unit."""

    def __init__(
        self,
        model: FittedClassifier,
        ers: RuleSet,
        table: FeedbackLookupTable | None = None,
        rng: np.random.Generator | None = None,
        boundary_flip: bool = True,
    ):
        self.model = model
        self.ers = ers
        self.schema = model.schema
        self.table = table if table is not None else FeedbackLookupTable(self.schema)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.boundary_flip = boundary_flip

    def add_feedback_rule(
        self,
        corrected: Rule,
        original: Optional[Rule] = None,
        t_config: Optional[TransformationConfig] = None,
    ) -> FeedbackRule:
        return self.table.add(corrected, original=original, t_config=t_config)

    def generate_response(self, x: Instance) -> Response:
        p = self.model.predict(x)
        explanations = self.ers.explain(x, p)
        last: Optional[Response] = None

        for e in explanations:
            candidates = self.table.candidates_for(e, p)
            if not candidates:
                continue
            response, confirmed = evaluate_feedback_rules(
                x, e, p, candidates, self.model, self.rng, self.boundary_flip
            )
            if confirmed:
                return response
            if response is not None:
                last = response
        if last is None:
            explanation_set = set(explanations)
            for key_clause, _key_label, candidates in self.table.keyed_entries():
                if key_clause in explanation_set:
                    continue
                response, confirmed = evaluate_feedback_rules(
                    x, key_clause, p, candidates, self.model, self.rng, self.boundary_flip
                )
                if confirmed:
                    return response
                if response is not None:
                    last = response
            if last is None:
                comp = self.table.complementary_entries()
                if comp:
                    # no originating boundary to straddle: match e' exactly
                    response, confirmed = evaluate_feedback_rules(
                        x, EMPTY_CLAUSE, p, comp, self.model, self.rng, boundary_flip=False
                    )
                    if confirmed:
                        return response
                    if response is not None:
                        last = response
        if last is not None:
            return last
        explanation = None
        if explanations:
            explanation = explanations[int(self.rng.integers(len(explanations)))]
        return Response(
            model_prediction=p,
            sc_prediction=p,
            hc_prediction=p,
            explanation=explanation,
        )
