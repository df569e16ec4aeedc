"""Oracle-driven simulation of online feedback learning.

Three modes are supported: ``exp1`` retrains the overlay's model after each
data slice, ``exp2`` freezes the overlay's model after the first slice while
the baseline keeps retraining, and ``active_learning`` compares the overlay
(model never retrained) against a retrained model fed by a low-margin
selector.  An oracle rule set stands in for the user: whenever no stored
feedback rule answers an instance, the oracle's label and a randomly chosen
oracle clause are submitted as a correction.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import Dataset, partition, train_test_split
from .explain import RuleSet, induce_rules
from .model import FittedClassifier, Hyperparams
from .overlay import ConflictError, FeedbackLookupTable, Overlay
from .rules import Clause, Rule
from .transform import TransformationConfig

logger = logging.getLogger(__name__)

SERIES_ML = "ml"
SERIES_SC = "overlay_sc"
SERIES_HC = "overlay_hc"
SERIES_AL = "al_model"

CURVE_HEADER = ["mode", "dataset", "seed", "series", "instances", "accuracy"]
AGGREGATE_HEADER = ["mode", "dataset", "series", "instances", "median", "p25", "p75"]


@dataclass
class ExperimentConfig:
    mode: str  # exp1 | exp2 | active_learning
    dataset_name: str = ""
    seeds: tuple[int, ...] = tuple(range(50))
    t_config: Optional[TransformationConfig] = None
    oracle_depth: Optional[int] = None  # None = unlimited
    partial_depth: int = 5
    oracle_purity_threshold: float = 0.9
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    batch_size: int = 10
    n_iterations: int = 20
    initial_fraction: float = 1.0 / 50.0

    def __post_init__(self):
        if self.mode not in ("exp1", "exp2", "active_learning"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class AccuracyCurve:
    series: str
    seed: int
    points: list[tuple[int, float]] = field(default_factory=list)

    def append(self, instances: int, accuracy: float) -> None:
        if self.points and instances < self.points[-1][0]:
            raise ValueError("instances_consumed must be non-decreasing")
        if not 0.0 <= accuracy <= 1.0:
            raise ValueError("accuracy out of range")
        self.points.append((instances, accuracy))


def compute_accuracy(
    overlay: Overlay,
    model: FittedClassifier,
    test: Dataset,
) -> tuple[float, float, float]:
    """Accuracy of the raw model and of the overlay's sc/hc answers."""
    if not test.rows:
        raise ValueError("empty test set")
    ml_hits = sc_hits = hc_hits = 0
    for x, y in zip(test.rows, test.labels):
        if model.predict(x) == y:
            ml_hits += 1
        response = overlay.generate_response(x)
        if response.sc_prediction == y:
            sc_hits += 1
        if response.hc_prediction == y:
            hc_hits += 1
    n = len(test.rows)
    return ml_hits / n, sc_hits / n, hc_hits / n


def build_oracle(
    ds: Dataset,
    max_depth: Optional[int] = None,
    purity_threshold: float = 0.9,
) -> RuleSet:
    """Rule set induced from ground truth on the full dataset."""
    index = {id(r): lbl for r, lbl in zip(ds.rows, ds.labels)}
    return induce_rules(
        lambda row: index[id(row)],
        ds.rows,
        ds.schema,
        role="FKRS",
        max_depth=max_depth,
        purity_threshold=purity_threshold,
    )


def _train_model(ds: Dataset, config: ExperimentConfig) -> FittedClassifier:
    return FittedClassifier.train(ds.rows, ds.labels, ds.schema, hyper=config.hyperparams)


def _learn_model_rules(model: FittedClassifier, ds: Dataset, config: ExperimentConfig) -> RuleSet:
    predicted = model.predict_many(ds.rows)
    index = {id(r): lbl for r, lbl in zip(ds.rows, predicted)}
    return induce_rules(
        lambda row: index[id(row)],
        ds.rows,
        ds.schema,
        role="PKRS",
        max_depth=config.partial_depth,
    )


def _submit_correction(
    overlay: Overlay,
    oracle: RuleSet,
    x: dict,
    label: str,
    t_config: TransformationConfig,
    rng: np.random.Generator,
) -> None:
    """Simulated user step of the online loops.

    Skipped when the oracle has no clause for the instance or a stored
    feedback rule already answered it (response carries a user label).
    """
    fk_clauses = oracle.explain(x, label)
    if not fk_clauses:
        return
    response = overlay.generate_response(x)
    if response.user_label is not None:
        return
    p = response.model_prediction
    e = response.explanation
    p_prime = label
    e_prime = fk_clauses[int(rng.integers(len(fk_clauses)))]
    corrected = Rule(e_prime, p_prime)
    try:
        if e is None:
            overlay.add_feedback_rule(corrected)
        elif e != e_prime or p != p_prime:
            overlay.add_feedback_rule(corrected, original=Rule(e, p), t_config=t_config)
    except ConflictError as exc:
        logger.warning("dropped conflicting oracle correction: %s", exc)


def run_experiment(config: ExperimentConfig, ds: Dataset, seed: int) -> list[AccuracyCurve]:
    """Slice-based online learning (modes exp1 and exp2)."""
    if config.mode not in ("exp1", "exp2"):
        raise ValueError("run_experiment handles exp1 and exp2 only")
    rng = np.random.default_rng(seed)
    t_config = config.t_config or TransformationConfig.for_schema(ds.schema)
    oracle = build_oracle(ds, config.oracle_depth, config.oracle_purity_threshold)

    train, test = train_test_split(ds, 0.8, seed)
    partitions = partition(train, 4)

    table = FeedbackLookupTable(ds.schema)
    curves = {
        SERIES_ML: AccuracyCurve(SERIES_ML, seed),
        SERIES_SC: AccuracyCurve(SERIES_SC, seed),
        SERIES_HC: AccuracyCurve(SERIES_HC, seed),
    }
    overlay: Optional[Overlay] = None
    for k in range(1, 4):
        x_slice = Dataset.concat(partitions[:k])
        pk_model = _train_model(x_slice, config)
        if config.mode == "exp1" or overlay is None:
            ers = _learn_model_rules(pk_model, x_slice, config)
            # Strict matching: with straddling admission a single correction
            # shadows its whole explanation region, so later instances there
            # never trigger corrections and the table stops growing.
            overlay = Overlay(pk_model, ers, table=table, rng=rng, boundary_flip=False)

        def measure(num_instances: int) -> None:
            acc_ml, acc_sc, acc_hc = compute_accuracy(overlay, pk_model, test)
            curves[SERIES_ML].append(num_instances, acc_ml)
            curves[SERIES_SC].append(num_instances, acc_sc)
            curves[SERIES_HC].append(num_instances, acc_hc)

        measure(len(x_slice.rows))
        learning_slice = partitions[k]
        size = len(learning_slice.rows)
        step = max(1, math.ceil(size / 10))
        for i in range(1, size + 1):
            x = learning_slice.rows[i - 1]
            label = learning_slice.labels[i - 1]
            _submit_correction(overlay, oracle, x, label, t_config, rng)
            if i % step == 0 or i == size:
                measure(i + len(x_slice.rows))
    return list(curves.values())


def low_margin_query(
    batch_size: int, pool_proba: np.ndarray
) -> np.ndarray:
    """Indices of the batch_size rows with closest class probabilities."""
    if pool_proba.shape[0] == 0:
        raise ValueError("empty pool")
    margins = np.abs(pool_proba[:, 1] - pool_proba[:, 0])
    order = np.argsort(margins, kind="stable")
    return order[:batch_size]


def run_active_learning(config: ExperimentConfig, ds: Dataset, seed: int) -> list[AccuracyCurve]:
    """Low-margin active learning against a never-retrained overlay."""
    if config.mode != "active_learning":
        raise ValueError("run_active_learning handles active_learning only")
    rng = np.random.default_rng(seed)
    t_config = config.t_config or TransformationConfig.for_schema(ds.schema)
    oracle = build_oracle(ds, config.oracle_depth, config.oracle_purity_threshold)

    train, test = train_test_split(ds, 0.8, seed)
    initial_size = max(2, int(len(ds.rows) * config.initial_fraction))
    labelled = train.subset(range(initial_size))
    pool = train.subset(range(initial_size, len(train.rows)))

    pk_model = _train_model(labelled, config)
    table = FeedbackLookupTable(ds.schema)
    ers = _learn_model_rules(pk_model, labelled, config)
    overlay = Overlay(pk_model, ers, table=table, rng=rng, boundary_flip=False)

    curves = {
        SERIES_AL: AccuracyCurve(SERIES_AL, seed),
        SERIES_SC: AccuracyCurve(SERIES_SC, seed),
        SERIES_HC: AccuracyCurve(SERIES_HC, seed),
    }

    def measure(num_instances: int, al_model: FittedClassifier) -> None:
        acc_ml, acc_sc, acc_hc = compute_accuracy(overlay, al_model, test)
        curves[SERIES_AL].append(num_instances, acc_ml)
        curves[SERIES_SC].append(num_instances, acc_sc)
        curves[SERIES_HC].append(num_instances, acc_hc)

    measure(0, pk_model)
    al_model = pk_model
    for k in range(1, config.n_iterations + 1):
        proba = al_model.predict_proba_many(pool.rows)
        picked = low_margin_query(config.batch_size, proba)
        batch = pool.subset(picked)
        for x, label in zip(batch.rows, batch.labels):
            _submit_correction(overlay, oracle, x, label, t_config, rng)
        keep = np.setdiff1d(np.arange(len(pool.rows)), picked)
        labelled = Dataset.concat([labelled, batch])
        pool = pool.subset(keep)
        al_model = _train_model(labelled, config)
        measure(config.batch_size * k, al_model)
    return list(curves.values())


def run_mode(config: ExperimentConfig, ds: Dataset, seed: int) -> list[AccuracyCurve]:
    if config.mode == "active_learning":
        return run_active_learning(config, ds, seed)
    return run_experiment(config, ds, seed)


def aggregate_curves(
    curves: list[AccuracyCurve],
) -> dict[str, list[tuple[int, float, float, float]]]:
    """Median and 25/75 percentiles per series per x-value across seeds.

    All seeds of a series must share the same x-grid; the grid is determined
    by the dataset size alone, so a mismatch signals a harness bug.
    """
    by_series: dict[str, list[AccuracyCurve]] = {}
    for curve in curves:
        by_series.setdefault(curve.series, []).append(curve)
    out: dict[str, list[tuple[int, float, float, float]]] = {}
    for series, group in by_series.items():
        grids = [[x for x, _ in c.points] for c in group]
        if any(g != grids[0] for g in grids[1:]):
            raise ValueError(f"mismatched x-grids across seeds for series {series}")
        rows = []
        for j, x in enumerate(grids[0]):
            values = np.array([c.points[j][1] for c in group])
            p25, median, p75 = np.percentile(values, [25, 50, 75])
            rows.append((x, float(median), float(p25), float(p75)))
        out[series] = rows
    return out


def write_curves_csv(path, mode: str, dataset: str, curves: list[AccuracyCurve]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_HEADER)
        for curve in curves:
            for instances, accuracy in curve.points:
                writer.writerow([mode, dataset, curve.seed, curve.series, instances, repr(accuracy)])


def write_aggregate_csv(
    path, mode: str, dataset: str, aggregate: dict[str, list[tuple[int, float, float, float]]]
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_HEADER)
        for series in sorted(aggregate):
            for x, median, p25, p75 in aggregate[series]:
                writer.writerow([mode, dataset, series, x, repr(median), repr(p25), repr(p75)])


def write_summary_json(path, config: ExperimentConfig, dataset: str, wall_seconds: float) -> None:
    summary = {
        "mode": config.mode,
        "dataset": dataset,
        "seeds": list(config.seeds),
        "partial_depth": config.partial_depth,
        "oracle_depth": config.oracle_depth,
        "batch_size": config.batch_size,
        "n_iterations": config.n_iterations,
        "wall_seconds": wall_seconds,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")


def run_all(config: ExperimentConfig, ds: Dataset) -> list[AccuracyCurve]:
    curves: list[AccuracyCurve] = []
    for seed in config.seeds:
        curves.extend(run_mode(config, ds, seed))
    return curves
