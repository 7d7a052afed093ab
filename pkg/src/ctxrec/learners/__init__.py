"""The five purchase predictors and their common fit/predict surface.

Regression kinds (linreg, lasso, ada_linreg) emit unbounded estimates;
classification kinds (j48, ada_tree) emit probabilities in [0, 1].  All
of them are consumed downstream as the inferred preference of a (user,
object) pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from ..errors import ContractError
from .boosting import (AdaBoostLinRegModel, AdaBoostStumpsModel,
                       fit_adaboost_linreg, fit_adaboost_stumps)
from .constant import ConstantModel
from .linear import LinearModel, fit_linreg, fit_lasso
from .tree import J48Model, fit_j48


class LearnerKind(str, Enum):
    LINREG = "linreg"
    LASSO = "lasso"
    ADA_LINREG = "ada_linreg"
    J48 = "j48"
    ADA_TREE = "ada_tree"


CLASSIFIER_KINDS = {LearnerKind.J48, LearnerKind.ADA_TREE}
ALL_KINDS = [k.value for k in LearnerKind]


@dataclass(frozen=True)
class LearnerConfig:
    kind: LearnerKind
    lam: float | None = None          # None: 5-fold CV over the default grid
    prune_confidence: float = 0.25
    boost_rounds: int = 50
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", LearnerKind(self.kind))
        if self.lam is not None and self.lam < 0:
            raise ContractError("lambda must be nonnegative")
        if not (0.0 < self.prune_confidence <= 1.0):
            raise ContractError("prune_confidence must be in (0, 1]")
        if self.boost_rounds < 1:
            raise ContractError("boost_rounds must be positive")


@dataclass(frozen=True)
class PreferenceEstimate:
    user_id: str
    object_id: str
    r_bar: float


def fit(config: LearnerConfig, matrix):
    """Train one model on a feature matrix.

    Deterministic for a fixed config (the only randomness, lasso's CV fold
    assignment, is driven by config.seed).  A single-class training set for
    a classification kind yields a flagged constant predictor.
    """
    X = np.asarray(matrix.X, float)
    y = np.asarray(matrix.y, float)
    columns = list(matrix.columns)
    if len(y) < 2:
        raise ContractError("training needs at least 2 rows")

    kind = config.kind
    n_pos = int((y > 0).sum())
    if kind in CLASSIFIER_KINDS and (n_pos == 0 or n_pos == len(y)):
        return ConstantModel(value=(n_pos + 1) / (len(y) + 2), columns=columns,
                             kind=kind.value)

    if kind == LearnerKind.LINREG:
        return fit_linreg(X, y, columns)
    if kind == LearnerKind.LASSO:
        return fit_lasso(X, y, columns, lam=config.lam, seed=config.seed)
    if kind == LearnerKind.ADA_LINREG:
        return fit_adaboost_linreg(X, y, columns,
                                   boost_rounds=config.boost_rounds)
    if kind == LearnerKind.J48:
        return fit_j48(X, y, columns, prune_confidence=config.prune_confidence)
    if kind == LearnerKind.ADA_TREE:
        return fit_adaboost_stumps(X, y, columns,
                                   boost_rounds=config.boost_rounds)
    raise ContractError(f"unknown learner kind {kind!r}")


def predict(model, data) -> np.ndarray:
    """Estimate preference for feature rows (ndarray or FeatureMatrix).

    The row schema must match the training schema; FeatureMatrix inputs are
    checked by column names, raw arrays by width.
    """
    if hasattr(data, "columns") and hasattr(data, "X"):
        if list(data.columns) != list(model.columns):
            raise ContractError("feature columns do not match the training schema")
        X = np.asarray(data.X, float)
    else:
        X = np.atleast_2d(np.asarray(data, float))
        if model.columns and X.shape[1] != len(model.columns):
            raise ContractError(
                f"expected {len(model.columns)} features, got {X.shape[1]}")
    out = model.predict(X)
    if model.kind in ("j48", "ada_tree"):
        assert np.all((out >= 0) & (out <= 1)), "classifier output left [0, 1]"
    if not np.all(np.isfinite(out)):
        raise ContractError("model produced non-finite estimates")
    return out


def save_model_summary(model, path) -> None:
    Path(path).write_text(json.dumps(model.summary(), indent=2, sort_keys=True)
                          + "\n", encoding="utf-8")


__all__ = [
    "LearnerKind", "LearnerConfig", "PreferenceEstimate",
    "fit", "predict", "save_model_summary",
    "fit_linreg", "fit_lasso", "fit_j48",
    "fit_adaboost_stumps", "fit_adaboost_linreg",
    "LinearModel", "J48Model", "AdaBoostStumpsModel", "AdaBoostLinRegModel",
    "ConstantModel", "CLASSIFIER_KINDS", "ALL_KINDS",
]
