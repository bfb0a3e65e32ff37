"""Binary-relevance multi-label classifier: one Gaussian NB per type.

Each per-type classifier compares class-conditional Gaussian log-likelihoods
plus log priors; ties resolve to 0. Variances are floored at
1e-9 * max total feature variance (absolute floor 1e-12) so zero-variance
features stay finite. A type whose training column is single-class degenerates
to a constant predictor with a logged warning.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .corpus import LabelVector
from .errors import ModelError

log = logging.getLogger(__name__)

VAR_EPSILON_SCALE = 1e-9
VAR_EPSILON_FLOOR = 1e-12


@dataclass(frozen=True)
class GaussianNbBinary:
    prior_pos: float
    prior_neg: float
    mean_pos: tuple[float, ...]
    mean_neg: tuple[float, ...]
    var_pos: tuple[float, ...]
    var_neg: tuple[float, ...]
    var_epsilon: float
    constant: int | None = None  # 0/1 when training saw a single class

    def to_json_dict(self) -> dict:
        d = {
            "prior_pos": self.prior_pos, "prior_neg": self.prior_neg,
            "mean_pos": list(self.mean_pos), "mean_neg": list(self.mean_neg),
            "var_pos": list(self.var_pos), "var_neg": list(self.var_neg),
            "var_epsilon": self.var_epsilon,
        }
        if self.constant is not None:
            d["constant"] = self.constant
        return d

    @classmethod
    def from_json_dict(cls, data: dict) -> "GaussianNbBinary":
        return cls(
            prior_pos=data["prior_pos"], prior_neg=data["prior_neg"],
            mean_pos=tuple(data["mean_pos"]), mean_neg=tuple(data["mean_neg"]),
            var_pos=tuple(data["var_pos"]), var_neg=tuple(data["var_neg"]),
            var_epsilon=data["var_epsilon"],
            constant=data.get("constant"),
        )


@dataclass(frozen=True)
class BrModel:
    types: tuple[str, ...]
    per_type: dict[str, GaussianNbBinary]

    @property
    def n_features(self) -> int:
        first = next(iter(self.per_type.values()))
        return len(first.mean_pos)

    def to_json_dict(self) -> dict:
        return {
            "types": list(self.types),
            "per_type": {t: clf.to_json_dict() for t, clf in self.per_type.items()},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BrModel":
        return cls(
            types=tuple(data["types"]),
            per_type={t: GaussianNbBinary.from_json_dict(d)
                      for t, d in data["per_type"].items()},
        )


@dataclass(frozen=True)
class PredictionVector:
    """Binary prediction over the type vocabulary, with diagnostic log-odds."""

    bits: tuple[int, ...]
    scores: tuple[float, ...] | None = None


def train_br(vectors: list[list[float]], labels: list[LabelVector],
             types: tuple[str, ...]) -> BrModel:
    if len(vectors) != len(labels):
        raise ModelError("vectors and labels must have the same length")
    if not vectors:
        raise ModelError("cannot train on an empty corpus")
    if any(len(lv.bits) != len(types) for lv in labels):
        raise ModelError("label width must equal the number of types")

    x = np.asarray(vectors, dtype=np.float64)
    y = np.asarray([lv.bits for lv in labels], dtype=np.int64)
    n = x.shape[0]

    total_var = x.var(axis=0)
    var_epsilon = max(VAR_EPSILON_SCALE * float(total_var.max(initial=0.0)),
                      VAR_EPSILON_FLOOR)

    per_type: dict[str, GaussianNbBinary] = {}
    for j, name in enumerate(types):
        mask = y[:, j] == 1
        n_pos = int(mask.sum())
        n_neg = n - n_pos
        if n_pos == 0 or n_neg == 0:
            bit = 1 if n_pos else 0
            log.warning("type %r has a single class in training; using constant-%d predictor",
                        name, bit)
            zeros = tuple(0.0 for _ in range(x.shape[1]))
            eps = tuple(var_epsilon for _ in range(x.shape[1]))
            per_type[name] = GaussianNbBinary(
                prior_pos=n_pos / n, prior_neg=n_neg / n,
                mean_pos=zeros, mean_neg=zeros, var_pos=eps, var_neg=eps,
                var_epsilon=var_epsilon, constant=bit,
            )
            continue
        pos, neg = x[mask], x[~mask]
        per_type[name] = GaussianNbBinary(
            prior_pos=n_pos / n, prior_neg=n_neg / n,
            mean_pos=tuple(pos.mean(axis=0)),
            mean_neg=tuple(neg.mean(axis=0)),
            var_pos=tuple(np.maximum(pos.var(axis=0), var_epsilon)),
            var_neg=tuple(np.maximum(neg.var(axis=0), var_epsilon)),
            var_epsilon=var_epsilon,
        )
    return BrModel(types=types, per_type=per_type)


def _log_likelihood(x: np.ndarray, mean: np.ndarray, var: np.ndarray) -> float:
    return float(-0.5 * np.sum(np.log(2.0 * math.pi * var) + (x - mean) ** 2 / var))


def log_odds(clf: GaussianNbBinary, vector: list[float]) -> float:
    """log P(class=1 | x) - log P(class=0 | x), up to the shared evidence term."""
    if clf.constant is not None:
        return math.inf if clf.constant == 1 else -math.inf
    x = np.asarray(vector, dtype=np.float64)
    if x.shape[0] != len(clf.mean_pos):
        raise ModelError(f"feature dimensionality mismatch: got {x.shape[0]}, "
                         f"model has {len(clf.mean_pos)}")
    pos = math.log(clf.prior_pos) + _log_likelihood(
        x, np.asarray(clf.mean_pos), np.asarray(clf.var_pos))
    neg = math.log(clf.prior_neg) + _log_likelihood(
        x, np.asarray(clf.mean_neg), np.asarray(clf.var_neg))
    return pos - neg


def predict(model: BrModel, vector: list[float]) -> PredictionVector:
    if len(vector) != model.n_features:
        raise ModelError(f"feature dimensionality mismatch: got {len(vector)}, "
                         f"model has {model.n_features}")
    scores = tuple(log_odds(model.per_type[t], vector) for t in model.types)
    bits = tuple(1 if s > 0 else 0 for s in scores)  # ties resolve to 0
    return PredictionVector(bits=bits, scores=scores)
