"""On-disk session: trained model, explainer rules, feedback table, and splits.

A session directory holds everything needed to answer predictions after a
restart: ``schema.json``, ``model.json``, ``ruleset.json``, ``feedback.jsonl``,
``tconfig.json``, plus the train/test splits and a small ``meta.json``.  The
feedback table is re-persisted after every successful mutation.
"""

from __future__ import annotations

import json
import os
import threading
from typing import Optional

import numpy as np

from .data import Dataset, load_csv, train_test_split
from .explain import ROLE_ERS, RuleSet, induce_rules
from .model import FittedClassifier, Hyperparams
from .overlay import FeedbackLookupTable, FeedbackRule, Overlay, Response
from .rules import Instance, NUMERIC, Rule, Schema
from .transform import TransformationConfig

SCHEMA_FILE = "schema.json"
MODEL_FILE = "model.json"
RULESET_FILE = "ruleset.json"
FEEDBACK_FILE = "feedback.jsonl"
TCONFIG_FILE = "tconfig.json"
TRAIN_FILE = "train.csv"
TEST_FILE = "test.csv"
META_FILE = "meta.json"


class SessionError(Exception):
    """Session-level failure with a machine-readable kind."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


def coerce_instance(schema: Schema, obj: dict) -> Instance:
    """Coerce a JSON object into a typed instance and validate it."""
    if not isinstance(obj, dict):
        raise SessionError("bad_instance", "instance must be a JSON object")
    x: Instance = {}
    for f in schema.features:
        if f.name not in obj:
            raise SessionError("bad_instance", f"missing feature {f.name!r}")
        v = obj[f.name]
        if f.kind == NUMERIC:
            try:
                x[f.name] = float(v)
            except (TypeError, ValueError):
                raise SessionError(
                    "bad_instance", f"feature {f.name!r} must be numeric, got {v!r}"
                ) from None
        else:
            x[f.name] = str(v)
    try:
        schema.validate_instance(x)
    except ValueError as exc:
        raise SessionError("bad_instance", str(exc)) from None
    return x


class SessionState:
    """One model + one feedback table, bound to a session directory."""

    def __init__(
        self,
        directory: str,
        model: FittedClassifier,
        ers: RuleSet,
        table: FeedbackLookupTable,
        t_config: TransformationConfig,
        train: Dataset,
        test: Dataset,
        seed: int,
    ):
        self.directory = directory
        self.model = model
        self.schema = model.schema
        self.ers = ers
        self.table = table
        self.t_config = t_config
        self.train = train
        self.test = test
        self.seed = seed
        self.overlay = Overlay(
            model, ers, table=table, rng=np.random.default_rng(seed)
        )
        self._write_lock = threading.Lock()

    # -- construction -------------------------------------------------------

    @classmethod
    def create(
        cls,
        directory: str,
        dataset: Dataset,
        seed: int = 0,
        hyper: Hyperparams | None = None,
        train_fraction: float = 0.8,
        explainer_depth: int = 5,
    ) -> "SessionState":
        """Train on a split of ``dataset`` and write all session artifacts."""
        train, test = train_test_split(dataset, train_fraction, seed)
        model = FittedClassifier.train(train.rows, train.labels, dataset.schema, hyper=hyper)
        predicted = model.predict_many(train.rows)
        by_id = {id(r): lbl for r, lbl in zip(train.rows, predicted)}
        ers = induce_rules(
            lambda row: by_id[id(row)],
            train.rows,
            dataset.schema,
            role=ROLE_ERS,
            max_depth=explainer_depth,
        )
        state = cls(
            directory,
            model,
            ers,
            FeedbackLookupTable(dataset.schema),
            TransformationConfig.for_schema(dataset.schema),
            train,
            test,
            seed,
        )
        state.save_all()
        return state

    @classmethod
    def load(cls, directory: str) -> "SessionState":
        model_path = os.path.join(directory, MODEL_FILE)
        if not os.path.isfile(model_path):
            raise SessionError(
                "not_fitted", f"no trained model in session directory {directory!r}"
            )
        with open(os.path.join(directory, META_FILE), "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        model = FittedClassifier.load(model_path)
        schema = model.schema
        ers = RuleSet.load(os.path.join(directory, RULESET_FILE), schema)
        feedback_path = os.path.join(directory, FEEDBACK_FILE)
        if os.path.isfile(feedback_path):
            table = FeedbackLookupTable.load_jsonl(feedback_path, schema)
        else:
            table = FeedbackLookupTable(schema)
        with open(os.path.join(directory, TCONFIG_FILE), "r", encoding="utf-8") as fh:
            t_config = TransformationConfig.from_json(json.load(fh))
        label_column = meta["label_column"]
        train = load_csv(
            os.path.join(directory, TRAIN_FILE), schema=schema, label_column=label_column
        )
        test = load_csv(
            os.path.join(directory, TEST_FILE), schema=schema, label_column=label_column
        )
        return cls(directory, model, ers, table, t_config, train, test, meta["seed"])

    # -- persistence --------------------------------------------------------

    def save_all(self) -> None:
        os.makedirs(self.directory, exist_ok=True)
        self.schema.save(os.path.join(self.directory, SCHEMA_FILE))
        self.model.save(os.path.join(self.directory, MODEL_FILE))
        self.ers.save(os.path.join(self.directory, RULESET_FILE))
        self.table.save_jsonl(os.path.join(self.directory, FEEDBACK_FILE))
        with open(os.path.join(self.directory, TCONFIG_FILE), "w", encoding="utf-8") as fh:
            json.dump(self.t_config.to_json(), fh)
        self.train.save_csv(os.path.join(self.directory, TRAIN_FILE))
        self.test.save_csv(os.path.join(self.directory, TEST_FILE))
        with open(os.path.join(self.directory, META_FILE), "w", encoding="utf-8") as fh:
            json.dump(
                {"seed": self.seed, "label_column": self.train.label_column}, fh
            )

    def _persist_table(self) -> None:
        self.table.save_jsonl(os.path.join(self.directory, FEEDBACK_FILE))

    # -- operations ---------------------------------------------------------

    def respond(self, x: Instance) -> Response:
        return self.overlay.generate_response(x)

    def add_feedback(
        self, corrected: Rule, original: Optional[Rule] = None
    ) -> FeedbackRule:
        with self._write_lock:
            fr = self.overlay.add_feedback_rule(
                corrected, original=original, t_config=self.t_config
            )
            self._persist_table()
            return fr

    def remove_feedback(self, rule_id: str) -> bool:
        with self._write_lock:
            removed = self.table.remove(rule_id)
            if removed:
                self._persist_table()
            return removed

    def trial_response(
        self, x: Instance, corrected: Rule, original: Optional[Rule] = None
    ) -> Response:
        """Answer as if the rule were stored, without persisting anything."""
        trial = self.table.clone()
        trial.add(corrected, original=original, t_config=self.t_config)
        overlay = Overlay(
            self.model, self.ers, table=trial, rng=np.random.default_rng(self.seed)
        )
        return overlay.generate_response(x)

    def split(self, name: str) -> Dataset:
        if name == "train":
            return self.train
        if name == "test":
            return self.test
        raise SessionError("bad_split", f"unknown split {name!r}")
