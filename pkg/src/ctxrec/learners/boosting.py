"""Adaptive boosting: classification with depth-1 trees and regression
with weighted least squares weak learners.

The classification variant follows the discrete reweighting scheme with
stump weak learners: alpha_t = 0.5*ln((1-eps_t)/eps_t), stopping early
when eps_t reaches 0 (keep the round) or 0.5 (drop it).  Scores map to
purchase probability through the logistic of twice the margin, which is
strictly monotone and therefore ranking-preserving.

The regression variant reweights instances by their linear loss relative
to the worst error of the round and predicts with the weighted median of
the weak learners (Drucker's scheme).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from .linear import standardize, weighted_least_squares

EPS_CLAMP = 1e-10


@dataclass(frozen=True)
class Stump:
    feature: int
    threshold: float
    sign: int  # predicts sign for x > threshold, -sign otherwise

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.where(X[:, self.feature] > self.threshold, 1.0, -1.0)
        return self.sign * out


@dataclass
class AdaBoostStumpsModel:
    stumps: list[Stump]
    alphas: np.ndarray
    columns: list[str]
    kind: str = "ada_tree"
    degenerate: bool = False

    def score(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, float)
        total = np.zeros(len(X))
        for stump, alpha in zip(self.stumps, self.alphas):
            total += alpha * stump.predict(X)
        return total

    def predict(self, X: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-2.0 * self.score(X)))

    def training_error(self, X: np.ndarray, y01: np.ndarray) -> float:
        pred = (self.score(np.asarray(X, float)) > 0).astype(float)
        return float(np.mean(pred != np.asarray(y01, float)))

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "columns": list(self.columns),
            "rounds": [
                {"feature": s.feature, "threshold": s.threshold,
                 "sign": s.sign, "alpha": float(a)}
                for s, a in zip(self.stumps, self.alphas)
            ],
            "degenerate": self.degenerate,
        }


def fit_adaboost_stumps(X: np.ndarray, y01: np.ndarray, columns: list[str],
                        boost_rounds: int = 50) -> AdaBoostStumpsModel:
    """Boost decision stumps on 0/1 labels."""
    X = np.asarray(X, float)
    ym = np.where(np.asarray(y01, float) > 0, 1.0, -1.0)
    n, p = X.shape
    orders = [np.argsort(X[:, j], kind="stable") for j in range(p)]
    sorted_vals = [X[orders[j], j] for j in range(p)]
    sorted_ym = [ym[orders[j]] for j in range(p)]

    weights = np.full(n, 1.0 / n)
    stumps: list[Stump] = []
    alphas: list[float] = []
    for _ in range(boost_rounds):
        best_err = np.inf
        best: Stump | None = None
        for j in range(p):
            w_sorted = weights[orders[j]]
            split_idx, sign, err = _kernels.stump_scan(sorted_vals[j],
                                                       sorted_ym[j], w_sorted)
            if split_idx >= 0 and err < best_err:
                vals = sorted_vals[j]
                best_err = err
                best = Stump(feature=j,
                             threshold=float((vals[split_idx]
                                              + vals[split_idx + 1]) / 2.0),
                             sign=sign)
        if best is None or best_err >= 0.5 - 1e-12:
            break
        eps = min(max(best_err, EPS_CLAMP), 1.0 - EPS_CLAMP)
        alpha = 0.5 * np.log((1.0 - eps) / eps)
        stumps.append(best)
        alphas.append(float(alpha))
        if best_err <= 1e-12:
            break
        weights = weights * np.exp(-alpha * ym * best.predict(X))
        weights /= weights.sum()

    if not stumps:
        n_pos = int((ym > 0).sum())
        from .constant import ConstantModel
        return ConstantModel(value=(n_pos + 1) / (n + 2), columns=columns,
                             kind="ada_tree", degenerate=True)
    return AdaBoostStumpsModel(stumps=stumps, alphas=np.array(alphas),
                               columns=columns)


@dataclass
class AdaBoostLinRegModel:
    coefs: np.ndarray       # (rounds, n_features), standardized space
    intercepts: np.ndarray  # (rounds,)
    alphas: np.ndarray      # ln(1/beta_t), all positive
    mean: np.ndarray
    scale: np.ndarray
    columns: list[str]
    kind: str = "ada_linreg"
    degenerate: bool = False

    def predict(self, X: np.ndarray) -> np.ndarray:
        Z = (np.asarray(X, float) - self.mean) / self.scale
        preds = Z @ self.coefs.T + self.intercepts  # (n, rounds)
        order = np.argsort(preds, axis=1)
        cum = np.cumsum(self.alphas[order], axis=1)
        half = 0.5 * self.alphas.sum()
        pick = (cum >= half).argmax(axis=1)
        return preds[np.arange(len(preds)), order[np.arange(len(preds)), pick]]

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "columns": list(self.columns),
            "rounds": [
                {"coefficients": [float(c) for c in coef],
                 "intercept": float(b), "alpha": float(a)}
                for coef, b, a in zip(self.coefs, self.intercepts, self.alphas)
            ],
            "degenerate": self.degenerate,
        }


def fit_adaboost_linreg(X: np.ndarray, y: np.ndarray, columns: list[str],
                        boost_rounds: int = 50) -> AdaBoostLinRegModel:
    """Boost weighted least squares regressors on real-valued labels."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    Z, mean, scale = standardize(X)
    n = len(y)

    weights = np.full(n, 1.0 / n)
    coefs, intercepts, alphas = [], [], []
    for _ in range(boost_rounds):
        prob = weights / weights.sum()
        coef, intercept = weighted_least_squares(Z, y, prob)
        pred = Z @ coef + intercept
        err = np.abs(pred - y)
        worst = err.max()
        if worst <= 0:
            coefs.append(coef)
            intercepts.append(intercept)
            alphas.append(float(np.log(1.0 / EPS_CLAMP)))
            break
        loss = err / worst
        avg_loss = float(np.dot(prob, loss))
        if avg_loss >= 0.5:
            break
        avg_loss = max(avg_loss, EPS_CLAMP)
        beta = avg_loss / (1.0 - avg_loss)
        coefs.append(coef)
        intercepts.append(intercept)
        alphas.append(float(np.log(1.0 / beta)))
        weights = weights * beta ** (1.0 - loss)

    if not coefs:
        # first weak learner already at average loss >= 0.5: constant fallback
        coefs.append(np.zeros(Z.shape[1]))
        intercepts.append(float(y.mean()))
        alphas.append(1.0)
        return AdaBoostLinRegModel(coefs=np.array(coefs),
                                   intercepts=np.array(intercepts),
                                   alphas=np.array(alphas), mean=mean,
                                   scale=scale, columns=columns, degenerate=True)
    return AdaBoostLinRegModel(coefs=np.array(coefs),
                               intercepts=np.array(intercepts),
                               alphas=np.array(alphas), mean=mean, scale=scale,
                               columns=columns)
