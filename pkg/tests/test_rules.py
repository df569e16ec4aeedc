import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rulepatch.rules import (
    CATEGORICAL,
    NUMERIC,
    EMPTY_CLAUSE,
    Clause,
    Condition,
    Feature,
    ParseError,
    Rule,
    Schema,
    SchemaError,
    clause_conjunction_satisfiable,
    evaluate_condition,
    format_clause,
    parse_clause,
    rules_conflict,
    satisfies,
)


def small_schema():
    return Schema(
        [
            Feature("x", NUMERIC, value_range=(0.0, 20.0)),
            Feature("y", NUMERIC, value_range=(0.0, 10.0)),
            Feature("c", CATEGORICAL, domain=("a", "b", "d")),
        ],
        ("neg", "pos"),
    )


class TestSchema:
    def test_duplicate_feature_names_rejected(self):
        with pytest.raises(SchemaError):
            Schema([Feature("x", NUMERIC), Feature("x", NUMERIC)], ("neg", "pos"))

    def test_categorical_needs_nonempty_domain(self):
        with pytest.raises(SchemaError):
            Feature("c", CATEGORICAL, domain=())

    def test_duplicate_categories_rejected(self):
        with pytest.raises(SchemaError):
            Feature("c", CATEGORICAL, domain=("a", "a"))

    def test_other_label_is_involution(self):
        s = small_schema()
        for label in s.labels:
            assert s.other_label(s.other_label(label)) == label

    def test_json_round_trip(self, tmp_path):
        s = small_schema()
        path = tmp_path / "schema.json"
        s.save(path)
        loaded = Schema.load(path)
        assert loaded.to_json() == s.to_json()


class TestEvaluateCondition:
    def test_numeric_greater_than(self):
        cond = Condition("nr.employed", ">", 5076.20)
        assert evaluate_condition(cond, {"nr.employed": 5100.0})

    def test_strict_boundary_is_excluded(self):
        assert not evaluate_condition(Condition("age", ">", 26.0), {"age": 26.0})

    def test_categorical_inequality_on_equal_value(self):
        cond = Condition("education", "!=", "Masters")
        assert not evaluate_condition(cond, {"education": "Masters"})

    def test_unknown_variable_errors(self):
        with pytest.raises(SchemaError):
            evaluate_condition(Condition("ghost", ">", 1.0), {"x": 2.0})

    def test_all_six_numeric_operators(self):
        x = {"v": 5.0}
        expected = {"==": True, "!=": False, ">": False, ">=": True, "<": False, "<=": True}
        for op, want in expected.items():
            assert evaluate_condition(Condition("v", op, 5.0), x) is want


class TestSatisfies:
    CLAUSE = Clause(
        [Condition("poutcome", "!=", "success"), Condition("duration", "<=", 368.0)]
    )

    def test_two_condition_conjunction(self):
        assert satisfies(self.CLAUSE, {"poutcome": "failure", "duration": 200.0})

    def test_empty_clause_satisfied_by_anything(self):
        assert satisfies(EMPTY_CLAUSE, {"poutcome": "success", "duration": 1.0})
        assert satisfies(EMPTY_CLAUSE, {})

    def test_first_conjunct_failing(self):
        assert not satisfies(self.CLAUSE, {"poutcome": "success", "duration": 200.0})

    def test_equals_fold_of_condition_evaluations(self):
        # conjunction semantics checked against direct per-condition evaluation
        rng = np.random.default_rng(3)
        schema = small_schema()
        for _ in range(200):
            conds = []
            if rng.random() < 0.8:
                conds.append(Condition("x", str(rng.choice(["<", ">", "==", ">="])), float(rng.integers(0, 21))))
            if rng.random() < 0.8:
                conds.append(Condition("c", str(rng.choice(["==", "!="])), str(rng.choice(["a", "b", "d"]))))
            clause = Clause(conds)
            x = {"x": float(rng.integers(0, 21)), "y": 0.0, "c": str(rng.choice(["a", "b", "d"]))}
            assert satisfies(clause, x) == all(evaluate_condition(c, x) for c in conds)


class TestClauseCanon:
    def test_at_most_one_condition_per_variable(self):
        with pytest.raises(SchemaError):
            Clause([Condition("x", ">", 1.0), Condition("x", "<", 5.0)])

    def test_clause_equality_ignores_condition_order(self):
        a = Clause([Condition("x", ">", 1.0), Condition("c", "==", "a")])
        b = Clause([Condition("c", "==", "a"), Condition("x", ">", 1.0)])
        assert a == b
        assert hash(a) == hash(b)

    def test_clauses_are_immutable(self):
        clause = Clause([Condition("x", ">", 1.0)])
        with pytest.raises(AttributeError):
            clause.conditions = ()


class TestConjunctionSatisfiable:
    def test_overlapping_half_lines(self):
        s = small_schema()
        c1 = parse_clause("x > 5.0", s)
        c2 = parse_clause("x > 7.0", s)
        assert clause_conjunction_satisfiable(c1, c2, s)

    def test_disjoint_half_lines(self):
        s = small_schema()
        assert not clause_conjunction_satisfiable(
            parse_clause("x > 5.0", s), parse_clause("x <= 5.0", s), s
        )

    def test_pinned_vs_excluded_category(self):
        s = small_schema()
        assert not clause_conjunction_satisfiable(
            parse_clause('c == "a"', s), parse_clause('c != "a"', s), s
        )

    def test_agrees_with_enumeration_on_random_pairs(self):
        # half-integer grid enumeration is exact for integer thresholds
        from satisfiability_oracle import brute_force_satisfiable, oracle_schema, random_clause

        s = oracle_schema()
        rng = np.random.default_rng(11)
        for _ in range(150):
            c1, c2 = random_clause(rng, s), random_clause(rng, s)
            assert clause_conjunction_satisfiable(c1, c2, s) == brute_force_satisfiable(c1, c2, s), (c1, c2)


class TestRulesConflict:
    def test_overlapping_clauses_with_different_labels(self):
        s = small_schema()
        r1 = Rule(parse_clause("x > 5.0", s), "pos")
        r2 = Rule(parse_clause("x > 7.0", s), "neg")
        assert rules_conflict(r1, r2, s)

    def test_same_label_never_conflicts(self):
        s = small_schema()
        r1 = Rule(parse_clause("x > 5.0", s), "pos")
        r2 = Rule(parse_clause("x > 7.0", s), "pos")
        assert not rules_conflict(r1, r2, s)

    def test_two_empty_clauses_with_different_labels(self):
        s = small_schema()
        assert rules_conflict(Rule(EMPTY_CLAUSE, "pos"), Rule(EMPTY_CLAUSE, "neg"), s)

    def test_symmetry(self):
        s = small_schema()
        rng = np.random.default_rng(5)
        for _ in range(100):
            ops = ["==", "!=", ">", ">=", "<", "<="]
            r1 = Rule(Clause([Condition("x", str(rng.choice(ops)), float(rng.integers(0, 21)))]), str(rng.choice(["pos", "neg"])))
            r2 = Rule(Clause([Condition("x", str(rng.choice(ops)), float(rng.integers(0, 21)))]), str(rng.choice(["pos", "neg"])))
            assert rules_conflict(r1, r2, s) == rules_conflict(r2, r1, s)


class TestParseFormat:
    def test_two_condition_clause(self, bank_schema):
        clause = parse_clause('poutcome != "success" AND duration <= 368.0', bank_schema)
        assert len(clause) == 2
        assert clause.condition_for("poutcome") == Condition("poutcome", "!=", "success")
        assert clause.condition_for("duration") == Condition("duration", "<=", 368.0)

    def test_format_parse_round_trip(self, bank_schema):
        corpus = [
            'poutcome != "success" AND duration <= 368.0',
            'poutcome == "success" AND nr.employed > 5076.2',
            "duration <= 548.0",
            'education == "Masters" AND age > 26.0',
        ]
        for text in corpus:
            clause = parse_clause(text, bank_schema)
            assert parse_clause(format_clause(clause), bank_schema) == clause

    def test_round_trip_on_numeric_clause(self):
        schema = Schema(
            [Feature("variance", NUMERIC), Feature("skewness", NUMERIC)],
            ("0", "1"),
        )
        text = "variance > -3.33 AND skewness > 5.8"
        assert format_clause(parse_clause(text, schema)) == text

    def test_invalid_operator_reports_position(self):
        s = small_schema()
        with pytest.raises(ParseError) as err:
            parse_clause("x >> 26.0", s)
        assert err.value.position >= 0

    def test_unknown_feature(self):
        with pytest.raises((ParseError, SchemaError)):
            parse_clause("ghost > 1.0", small_schema())

    def test_kind_mismatch(self):
        with pytest.raises(ParseError):
            parse_clause('x == "a"', small_schema())

    def test_duplicate_variable_rejected(self):
        with pytest.raises(ParseError):
            parse_clause("x > 1.0 AND x < 5.0", small_schema())

    def test_empty_text_rejected(self):
        with pytest.raises(ParseError):
            parse_clause("", small_schema())


@st.composite
def clauses(draw):
    conds = []
    if draw(st.booleans()):
        op = draw(st.sampled_from(["==", "!=", ">", ">=", "<", "<="]))
        conds.append(Condition("x", op, float(draw(st.integers(0, 20)))))
    op = draw(st.sampled_from(["==", "!="]))
    conds.append(Condition("c", op, draw(st.sampled_from(["a", "b", "d"]))))
    return Clause(conds)


@settings(max_examples=200, deadline=None)
@given(clause=clauses())
def test_parse_format_identity_property(clause):
    s = small_schema()
    assert parse_clause(format_clause(clause), s) == clause


@settings(max_examples=200, deadline=None)
@given(clause=clauses(), xv=st.integers(0, 20), cv=st.sampled_from(["a", "b", "d"]))
def test_satisfies_matches_condition_fold_property(clause, xv, cv):
    x = {"x": float(xv), "y": 0.0, "c": cv}
    assert satisfies(clause, x) == all(evaluate_condition(c, x) for c in clause.conditions)
