"""Builders for the four benchmark datasets used by the experiment harness.

Two are exact: the tic-tac-toe endgame corpus is regenerated by enumerating
every terminal board of the game (x moves first), and the breast-cancer data
is the Wisconsin diagnostic set shipped with scikit-learn.  The banknote and
bank-marketing corpora are not redistributable here, so deterministic
synthetic stand-ins with the same shape and comparable learnability are
generated instead; see the README for the generating rules.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset
from .rules import CATEGORICAL, NUMERIC, Feature, Schema

TTT_CELLS = ("tl", "tm", "tr", "ml", "mm", "mr", "bl", "bm", "br")
_TTT_LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6))


def _winner(board: tuple) -> str | None:
    for a, b, c in _TTT_LINES:
        if board[a] != "b" and board[a] == board[b] == board[c]:
            return board[a]
    return None


def tic_tac_toe() -> Dataset:
    """All 958 terminal boards; positive iff x completed three in a row."""
    terminal: dict[tuple, str] = {}

    def play(board: tuple, player: str):
        w = _winner(board)
        if w is not None or "b" not in board:
            terminal[board] = w or "draw"
            return
        for i, cell in enumerate(board):
            if cell == "b":
                play(board[:i] + (player,) + board[i + 1:], "o" if player == "x" else "x")

    play(("b",) * 9, "x")
    boards = sorted(terminal)
    schema = Schema(
        [Feature(c, CATEGORICAL, domain=("b", "o", "x")) for c in TTT_CELLS],
        labels=("negative", "positive"),
    )
    rows = [dict(zip(TTT_CELLS, board)) for board in boards]
    labels = ["positive" if terminal[b] == "x" else "negative" for b in boards]
    return Dataset(schema, "class", rows, labels)


def breast_cancer() -> Dataset:
    """Wisconsin diagnostic breast cancer (569 x 30) via scikit-learn; M positive."""
    from sklearn.datasets import load_breast_cancer

    raw = load_breast_cancer()
    names = [n.replace(" ", "-") for n in raw.feature_names]
    schema = Schema([Feature(n, NUMERIC) for n in names], labels=("B", "M"))
    rows = [dict(zip(names, map(float, sample))) for sample in raw.data]
    # scikit-learn target: 0 = malignant, 1 = benign
    labels = ["B" if t == 1 else "M" for t in raw.target]
    return Dataset(schema, "diagnosis", rows, labels)


_BANKNOTE_FEATURES = ("variance", "skewness", "curtosis", "entropy")


def banknote(seed: int = 20240913, n: int = 1372) -> Dataset:
    """Synthetic stand-in for the banknote authentication set (1372 x 4 numeric).

    The class is mostly a single skewness threshold, which a linear model
    captures from a small sample, plus a small high-variance/high-curtosis
    pocket whose flipped labels the linear model cannot express but an
    axis-aligned tree can.
    """
    rng = np.random.default_rng(seed)
    variance = rng.normal(0.4, 2.8, n)
    skewness = rng.normal(1.9, 5.8, n)
    curtosis = rng.normal(1.4, 4.3, n)
    entropy = rng.normal(-1.2, 2.1, n)
    base = skewness > 1.9
    pocket = (variance > 3.4) & (curtosis > 5.8)
    label_bool = np.where(pocket, ~base, base)
    schema = Schema([Feature(f, NUMERIC) for f in _BANKNOTE_FEATURES], labels=("0", "1"))
    rows = [
        {
            "variance": round(float(variance[i]), 4),
            "skewness": round(float(skewness[i]), 4),
            "curtosis": round(float(curtosis[i]), 4),
            "entropy": round(float(entropy[i]), 4),
        }
        for i in range(n)
    ]
    labels = ["1" if b else "0" for b in label_bool]
    return Dataset(schema, "class", rows, labels)


_POUTCOME = ("failure", "nonexistent", "other", "success")
_MARITAL = ("divorced", "married", "single")
_JOB = ("admin.", "blue-collar", "management", "retired", "services", "technician")


def bank_marketing(seed: int = 20240914, n: int = 45211) -> Dataset:
    """Synthetic stand-in for the bank-marketing set with Table-2-style columns."""
    rng = np.random.default_rng(seed)
    age = rng.integers(18, 90, n).astype(float)
    duration = np.round(rng.gamma(2.0, 150.0, n), 0)
    nr_employed = np.round(rng.normal(5120.0, 80.0, n), 1)
    emp_var_rate = np.round(rng.normal(-0.5, 1.6, n), 1)
    poutcome = rng.choice(_POUTCOME, n, p=(0.11, 0.74, 0.05, 0.10))
    marital = rng.choice(_MARITAL, n, p=(0.12, 0.60, 0.28))
    job = rng.choice(_JOB, n, p=(0.23, 0.21, 0.2, 0.06, 0.1, 0.2))
    score = (
        (poutcome == "success") * 2.2
        + (duration > 400) * 1.4
        + (emp_var_rate < -1.5) * 0.8
        + (nr_employed < 5090) * 0.7
        - 2.6
    )
    noise = rng.normal(0.0, 0.7, n)
    label_bool = (score + noise) > 0
    schema = Schema(
        [
            Feature("age", NUMERIC),
            Feature("duration", NUMERIC),
            Feature("nr.employed", NUMERIC),
            Feature("emp.var.rate", NUMERIC),
            Feature("poutcome", CATEGORICAL, domain=_POUTCOME),
            Feature("marital", CATEGORICAL, domain=_MARITAL),
            Feature("job", CATEGORICAL, domain=_JOB),
        ],
        labels=("no", "yes"),
    )
    rows = [
        {
            "age": float(age[i]),
            "duration": float(duration[i]),
            "nr.employed": float(nr_employed[i]),
            "emp.var.rate": float(emp_var_rate[i]),
            "poutcome": str(poutcome[i]),
            "marital": str(marital[i]),
            "job": str(job[i]),
        }
        for i in range(n)
    ]
    labels = ["yes" if b else "no" for b in label_bool]
    return Dataset(schema, "y", rows, labels)


BUILDERS = {
    "tic-tac-toe": tic_tac_toe,
    "breast-cancer": breast_cancer,
    "banknote": banknote,
    "bank-marketing": bank_marketing,
}


def build(name: str) -> Dataset:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(BUILDERS)}") from None
