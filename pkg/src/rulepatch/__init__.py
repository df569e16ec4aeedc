"""Interactive overlay for patching binary classifiers via boolean rule edits."""

from .data import DataError, Dataset, load_csv, partition, train_test_split
from .explain import ROLE_ERS, ROLE_FKRS, ROLE_PKRS, DecisionTree, RuleSet, induce_rules
from .model import FittedClassifier, Hyperparams, LogisticModel, ModelError, Preprocessor
from .overlay import (
    ConflictError,
    FeedbackError,
    FeedbackLookupTable,
    FeedbackRule,
    Overlay,
    Response,
    evaluate_feedback_rules,
)
from .rules import (
    CATEGORICAL,
    EMPTY_CLAUSE,
    NUMERIC,
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
from .session import SessionError, SessionState
from .simulate import ExperimentConfig, run_mode
from .transform import (
    TransformError,
    TransformationConfig,
    TransformationFunction,
    apply_transformation,
    build_transformation,
    diff_function,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
