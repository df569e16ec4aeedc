"""Binary classifier layer: standardize/one-hot preprocessing and logistic
regression trained by deterministic full-batch gradient descent."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .rules import CATEGORICAL, NUMERIC, Instance, Schema


class ModelError(ValueError):
    pass


class Preprocessor:
    """Standardizes numeric features and one-hot encodes categorical ones.

    Category order is fixed at fit time (sorted distinct observed values);
    unseen categories encode as an all-zero block.  A constant numeric column
    stores stddev 1 so its standardized values are all zero.
    """

    def __init__(self, schema: Schema, numeric_stats: dict, categories: dict):
        self.schema = schema
        self.numeric_stats = numeric_stats  # name -> (mean, std)
        self.categories = categories  # name -> ordered list
        self.width = sum(
            1 if f.kind == NUMERIC else len(categories[f.name]) for f in schema.features
        )

    @classmethod
    def fit(cls, X: list[Instance], schema: Schema) -> "Preprocessor":
        if not X:
            raise ModelError("cannot fit preprocessor on empty data")
        numeric_stats = {}
        categories = {}
        for f in schema.features:
            col = [x[f.name] for x in X]
            if f.kind == NUMERIC:
                arr = np.asarray(col, dtype=float)
                mean = float(arr.mean())
                std = float(arr.std())  # population stddev
                if std == 0.0:
                    std = 1.0
                numeric_stats[f.name] = (mean, std)
            else:
                categories[f.name] = sorted(set(col))
        return cls(schema, numeric_stats, categories)

    def encode(self, x: Instance) -> np.ndarray:
        out = np.zeros(self.width)
        i = 0
        for f in self.schema.features:
            if f.kind == NUMERIC:
                mean, std = self.numeric_stats[f.name]
                out[i] = (float(x[f.name]) - mean) / std
                i += 1
            else:
                cats = self.categories[f.name]
                v = x[f.name]
                try:
                    out[i + cats.index(v)] = 1.0
                except ValueError:
                    pass  # unseen category: zero block
                i += len(cats)
        return out

    def encode_many(self, X: list[Instance]) -> np.ndarray:
        return np.stack([self.encode(x) for x in X]) if X else np.zeros((0, self.width))

    def to_json(self) -> dict:
        return {
            "numeric_stats": {k: list(v) for k, v in self.numeric_stats.items()},
            "categories": dict(self.categories),
        }

    @classmethod
    def from_json(cls, obj: dict, schema: Schema) -> "Preprocessor":
        stats = {k: tuple(v) for k, v in obj["numeric_stats"].items()}
        return cls(schema, stats, {k: list(v) for k, v in obj["categories"].items()})


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class Hyperparams:
    max_iterations: int = 500
    learning_rate: float = 1.0
    l2_strength: float = 3.0
    tolerance: float = 1e-6

    def to_json(self) -> dict:
        return self.__dict__.copy()


def logistic_loss(weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean cross-entropy plus L2 penalty on the weights (bias unpenalized)."""
    z = X @ weights + bias
    # log(1 + exp(-z*s)) with s in {-1, +1}, numerically stable
    s = 2.0 * y - 1.0
    loss = float(np.mean(np.logaddexp(0.0, -s * z)))
    n = X.shape[0]
    return loss + l2 * float(weights @ weights) / (2.0 * n)


def logistic_gradient(
    weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[np.ndarray, float]:
    n = X.shape[0]
    p = _sigmoid(X @ weights + bias)
    grad_w = X.T @ (p - y) / n + l2 * weights / n
    grad_b = float(np.mean(p - y))
    return grad_w, grad_b


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    hyper: Hyperparams
    iterations_run: int = 0
    loss_history: list = field(default_factory=list)

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, hyper: Hyperparams | None = None) -> "LogisticModel":
        """Zero-initialized gradient descent; deterministic given the inputs."""
        hyper = hyper or Hyperparams()
        if X.shape[0] < 2 or X.shape[0] != y.shape[0]:
            raise ModelError("need at least two paired samples")
        if len(np.unique(y)) < 2:
            raise ModelError("degenerate labels: both classes must be present")
        w = np.zeros(X.shape[1])
        b = 0.0
        losses = [logistic_loss(w, b, X, y, hyper.l2_strength)]
        it = 0
        step = hyper.learning_rate
        for it in range(1, hyper.max_iterations + 1):
            gw, gb = logistic_gradient(w, b, X, y, hyper.l2_strength)
            # halve the step until the loss decreases, keeping descent monotone
            while True:
                w_new = w - step * gw
                b_new = b - step * gb
                loss = logistic_loss(w_new, b_new, X, y, hyper.l2_strength)
                if loss <= losses[-1] or step < 1e-12:
                    break
                step /= 2.0
            w, b = w_new, b_new
            losses.append(loss)
            if losses[-2] - loss < hyper.tolerance:
                break
        return cls(weights=w, bias=b, hyper=hyper, iterations_run=it, loss_history=losses)

    def proba_positive(self, encoded: np.ndarray) -> float:
        return float(_sigmoid(np.atleast_1d(encoded @ self.weights + self.bias))[0])


class FittedClassifier:
    """Preprocessor + logistic model over a schema; predictions are pure."""

    def __init__(self, schema: Schema, preprocessor: Preprocessor, model: LogisticModel):
        self.schema = schema
        self.preprocessor = preprocessor
        self.model = model

    @classmethod
    def train(
        cls,
        X: list[Instance],
        y: list[str],
        schema: Schema,
        hyper: Hyperparams | None = None,
    ) -> "FittedClassifier":
        if len(X) != len(y):
            raise ModelError("instances and labels must pair up")
        pre = Preprocessor.fit(X, schema)
        enc = pre.encode_many(X)
        target = np.array([1.0 if label == schema.positive else 0.0 for label in y])
        model = LogisticModel.fit(enc, target, hyper)
        return cls(schema, pre, model)

    def predict_proba(self, x: Instance) -> tuple[float, float]:
        p_pos = self.model.proba_positive(self.preprocessor.encode(x))
        return (1.0 - p_pos, p_pos)

    def predict(self, x: Instance) -> str:
        """Positive label iff the positive probability strictly exceeds 0.5."""
        _, p_pos = self.predict_proba(x)
        return self.schema.positive if p_pos > 0.5 else self.schema.negative

    def predict_proba_many(self, X: list[Instance]) -> np.ndarray:
        enc = self.preprocessor.encode_many(X)
        p_pos = _sigmoid(enc @ self.model.weights + self.model.bias)
        return np.column_stack([1.0 - p_pos, p_pos])

    def predict_many(self, X: list[Instance]) -> list[str]:
        probas = self.predict_proba_many(X)
        return [self.schema.positive if p > 0.5 else self.schema.negative for p in probas[:, 1]]

    def to_json(self) -> dict:
        return {
            "weights": self.model.weights.tolist(),
            "bias": self.model.bias,
            "hyperparams": self.model.hyper.to_json(),
            "preprocessor": self.preprocessor.to_json(),
            "schema": self.schema.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FittedClassifier":
        schema = Schema.from_json(obj["schema"])
        pre = Preprocessor.from_json(obj["preprocessor"], schema)
        model = LogisticModel(
            weights=np.asarray(obj["weights"], dtype=float),
            bias=float(obj["bias"]),
            hyper=Hyperparams(**obj["hyperparams"]),
        )
        return cls(schema, pre, model)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "FittedClassifier":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))
