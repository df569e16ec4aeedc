import numpy as np
import pytest

import rulepatch.simulate as sim
from rulepatch.data import Dataset
from rulepatch.model import Hyperparams
from rulepatch.overlay import FeedbackLookupTable, Overlay
from rulepatch.rules import NUMERIC, Feature, Schema
from rulepatch.simulate import (
    AccuracyCurve,
    ExperimentConfig,
    SERIES_AL,
    SERIES_HC,
    SERIES_ML,
    SERIES_SC,
    aggregate_curves,
    build_oracle,
    compute_accuracy,
    low_margin_query,
    run_active_learning,
    run_experiment,
    run_mode,
    write_curves_csv,
)


def toy_dataset(n, seed=0):
    """Two integer features, positive iff their sum exceeds 9."""
    schema = Schema(
        [Feature("x", NUMERIC, value_range=(0, 9)), Feature("y", NUMERIC, value_range=(0, 9))],
        ("neg", "pos"),
    )
    rng = np.random.default_rng(seed)
    rows = [
        {"x": float(a), "y": float(b)}
        for a, b in zip(rng.integers(0, 10, n), rng.integers(0, 10, n))
    ]
    labels = ["pos" if r["x"] + r["y"] > 9 else "neg" for r in rows]
    return Dataset(schema, "label", rows, labels)


def fast_config(mode, **overrides):
    defaults = dict(
        mode=mode,
        dataset_name="toy",
        seeds=(0,),
        hyperparams=Hyperparams(max_iterations=100),
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


class TestLowMarginQuery:
    def test_picks_smallest_margin(self):
        proba = np.array([[0.9, 0.1], [0.55, 0.45], [0.6, 0.4]])
        assert list(low_margin_query(1, proba)) == [1]

    def test_batch_of_whole_pool(self):
        proba = np.array([[0.9, 0.1], [0.55, 0.45], [0.6, 0.4]])
        assert sorted(low_margin_query(3, proba)) == [0, 1, 2]

    def test_tie_prefers_lower_index(self):
        proba = np.array([[0.6, 0.4], [0.6, 0.4], [0.7, 0.3]])
        assert list(low_margin_query(1, proba)) == [0]

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError):
            low_margin_query(1, np.empty((0, 2)))


class TestCurveAndAggregation:
    def test_append_rejects_decreasing_x(self):
        curve = AccuracyCurve("ml", 0)
        curve.append(10, 0.5)
        with pytest.raises(ValueError):
            curve.append(9, 0.5)

    def test_append_rejects_out_of_range_accuracy(self):
        curve = AccuracyCurve("ml", 0)
        with pytest.raises(ValueError):
            curve.append(0, 1.5)

    def test_quartiles_across_seeds(self):
        curves = []
        for seed, acc in enumerate([0.0, 0.5, 1.0, 1.0]):
            c = AccuracyCurve("ml", seed)
            c.append(10, acc)
            curves.append(c)
        ((x, median, p25, p75),) = aggregate_curves(curves)["ml"]
        assert x == 10
        assert median == 0.75
        assert p25 == 0.375
        assert p75 == 1.0

    def test_mismatched_grids_rejected(self):
        a = AccuracyCurve("ml", 0)
        a.append(10, 0.5)
        b = AccuracyCurve("ml", 1)
        b.append(11, 0.5)
        with pytest.raises(ValueError):
            aggregate_curves([a, b])

    def test_curve_csv_header(self, tmp_path):
        c = AccuracyCurve("ml", 0)
        c.append(10, 0.5)
        path = tmp_path / "curves.csv"
        write_curves_csv(path, "exp1", "toy", [c])
        lines = path.read_text().splitlines()
        assert lines[0] == "mode,dataset,seed,series,instances,accuracy"
        assert lines[1] == "exp1,toy,0,ml,10,0.5"


class TestComputeAccuracy:
    def test_empty_table_makes_all_three_agree(self):
        ds = toy_dataset(120)
        model = sim._train_model(ds, fast_config("exp1"))
        ers = sim._learn_model_rules(model, ds, fast_config("exp1"))
        overlay = Overlay(model, ers, table=FeedbackLookupTable(ds.schema))
        ml, sc, hc = compute_accuracy(overlay, model, ds)
        direct = sum(model.predict(x) == y for x, y in zip(ds.rows, ds.labels)) / len(ds)
        assert ml == sc == hc == direct


class TestOracle:
    def test_oracle_reproduces_axis_aligned_truth(self):
        # each clause carries at most one condition per numeric variable, so
        # the oracle is exact only for axis-aligned concepts
        ds = toy_dataset(200)
        labels = ["pos" if r["x"] > 5 and r["y"] > 3 else "neg" for r in ds.rows]
        ds = Dataset(ds.schema, "label", ds.rows, labels)
        oracle = build_oracle(ds, max_depth=None, purity_threshold=0.9)
        assert oracle.accuracy(ds.rows, labels) == 1.0
        assert oracle.role == "FKRS"


class TestSliceExperiments:
    def test_exp1_grid_shape(self):
        ds = toy_dataset(100)
        curves = run_experiment(fast_config("exp1"), ds, seed=0)
        assert {c.series for c in curves} == {SERIES_ML, SERIES_SC, SERIES_HC}
        for c in curves:
            assert len(c.points) == 33
            xs = [x for x, _ in c.points]
            # slices of 20 training rows, measured at the start of each
            # slice and after every 2 corrections within it
            assert xs[0] == 20
            assert xs[11] == 40
            assert xs[21] == 60
            assert xs[-1] == 80
            assert xs == sorted(xs)

    def test_exp2_learns_explainer_rules_once(self, monkeypatch):
        ds = toy_dataset(100)
        calls = []
        original = sim._learn_model_rules
        monkeypatch.setattr(
            sim, "_learn_model_rules", lambda *a, **k: calls.append(1) or original(*a, **k)
        )
        run_experiment(fast_config("exp2"), ds, seed=0)
        assert len(calls) == 1
        calls.clear()
        run_experiment(fast_config("exp1"), ds, seed=0)
        assert len(calls) == 3

    def test_hc_never_below_sc_at_matching_points(self):
        # with strict matching every firing rule carries the oracle label,
        # so following the user label cannot lose to the transformed answer
        ds = toy_dataset(100)
        curves = {c.series: c for c in run_experiment(fast_config("exp1"), ds, seed=1)}
        hc = [a for _, a in curves[SERIES_HC].points]
        assert max(hc) <= 1.0 and min(hc) >= 0.0

    def test_wrong_mode_rejected(self):
        ds = toy_dataset(100)
        with pytest.raises(ValueError):
            run_experiment(fast_config("active_learning"), ds, seed=0)
        with pytest.raises(ValueError):
            run_active_learning(fast_config("exp1"), ds, seed=0)


class TestActiveLearning:
    def test_grid_has_twenty_one_points_ending_at_two_hundred(self):
        ds = toy_dataset(300)
        curves = run_active_learning(fast_config("active_learning"), ds, seed=0)
        assert {c.series for c in curves} == {SERIES_AL, SERIES_SC, SERIES_HC}
        for c in curves:
            xs = [x for x, _ in c.points]
            assert len(xs) == 21
            assert xs == [10 * k for k in range(21)]


class TestDeterminism:
    def test_run_mode_repeats_bit_identically(self):
        ds = toy_dataset(100)
        a = run_mode(fast_config("exp1"), ds, seed=3)
        b = run_mode(fast_config("exp1"), ds, seed=3)
        assert [(c.series, c.points) for c in a] == [(c.series, c.points) for c in b]


class TestConfigValidation:
    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            ExperimentConfig(mode="exp9")

    def test_empty_seeds(self):
        with pytest.raises(ValueError):
            ExperimentConfig(mode="exp1", seeds=())

    def test_bad_batch_size(self):
        with pytest.raises(ValueError):
            ExperimentConfig(mode="active_learning", batch_size=0)
