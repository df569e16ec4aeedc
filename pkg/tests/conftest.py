import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rulepatch import benchmarks
from rulepatch.rules import CATEGORICAL, NUMERIC, Feature, Schema


@pytest.fixture(scope="session")
def bank_schema() -> Schema:
    return Schema(
        [
            Feature("age", NUMERIC),
            Feature("duration", NUMERIC),
            Feature("nr.employed", NUMERIC),
            Feature(
                "poutcome", CATEGORICAL, domain=("failure", "nonexistent", "success")
            ),
            Feature(
                "education",
                CATEGORICAL,
                domain=("Bachelors", "Masters", "Doctorate"),
            ),
        ],
        ("no", "yes"),
    )


@pytest.fixture(scope="session")
def ttt():
    return benchmarks.tic_tac_toe()


@pytest.fixture(scope="session")
def banknote():
    return benchmarks.banknote()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
