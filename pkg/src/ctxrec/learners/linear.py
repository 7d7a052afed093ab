"""Linear-family purchase predictors: least squares and L1-regularized
least squares (coordinate descent), both on internally standardized
features.

The lasso objective is (1/2n)*||y - Xw - b||^2 + lambda*||w||_1 with an
unpenalized intercept.  Columns are standardized to zero mean and unit
variance from the training rows, so the intercept equals the label mean
and the coordinate updates need no per-column rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _kernels

LAMBDA_GRID = (0.001, 0.01, 0.1, 1.0)
CD_MAX_ITER = 10000
CD_TOL = 1e-10


def standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Zero-mean unit-variance scaling; constant columns keep scale 1."""
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    return (X - mean) / scale, mean, scale


@dataclass
class LinearModel:
    kind: str
    columns: list[str]
    mean: np.ndarray
    scale: np.ndarray
    coef: np.ndarray          # in standardized feature space
    intercept: float
    lam: float | None = None
    n_iter: int = 0
    degenerate: bool = False

    def predict(self, X: np.ndarray) -> np.ndarray:
        Z = (np.asarray(X, float) - self.mean) / self.scale
        return Z @ self.coef + self.intercept

    def original_coefficients(self) -> tuple[np.ndarray, float]:
        """Slope/intercept in the original (unstandardized) feature space."""
        coef = self.coef / self.scale
        intercept = self.intercept - float(np.dot(self.coef, self.mean / self.scale))
        return coef, intercept

    def summary(self) -> dict:
        coef, intercept = self.original_coefficients()
        return {
            "kind": self.kind,
            "columns": list(self.columns),
            "coefficients": [float(c) for c in coef],
            "intercept": float(intercept),
            "lambda": self.lam,
            "degenerate": self.degenerate,
        }


def fit_linreg(X: np.ndarray, y: np.ndarray, columns: list[str]) -> LinearModel:
    """Ordinary least squares with intercept."""
    Z, mean, scale = standardize(np.asarray(X, float))
    y = np.asarray(y, float)
    intercept = float(y.mean())
    coef, *_ = np.linalg.lstsq(Z, y - intercept, rcond=None)
    return LinearModel(kind="linreg", columns=columns, mean=mean, scale=scale,
                       coef=coef, intercept=intercept)


def _fit_lasso_fixed(X: np.ndarray, y: np.ndarray, lam: float,
                     columns: list[str], tol: float = CD_TOL) -> LinearModel:
    Z, mean, scale = standardize(np.asarray(X, float))
    y = np.asarray(y, float)
    intercept = float(y.mean())
    xt = np.ascontiguousarray(Z.T)
    coef, n_iter, _ = _kernels.lasso_cd(xt, y - intercept, lam,
                                        max_iter=CD_MAX_ITER, tol=tol)
    return LinearModel(kind="lasso", columns=columns, mean=mean, scale=scale,
                       coef=coef, intercept=intercept, lam=lam, n_iter=n_iter)


def select_lambda_cv(X: np.ndarray, y: np.ndarray, seed: int,
                     grid=LAMBDA_GRID, n_folds: int = 5) -> float:
    """Pick lambda from the grid by k-fold CV mean squared error.

    Ties within 1e-12 resolve toward the stronger penalty.
    """
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n = len(y)
    n_folds = min(n_folds, n)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    folds = np.array_split(order, n_folds)

    best_lam, best_mse = None, np.inf
    for lam in grid:
        errors = []
        for f in folds:
            if len(f) == 0 or len(f) == n:
                continue
            mask = np.ones(n, dtype=bool)
            mask[f] = False
            model = _fit_lasso_fixed(X[mask], y[mask], lam, columns=[], tol=1e-8)
            pred = model.predict(X[f])
            errors.append(float(np.mean((pred - y[f]) ** 2)))
        mse = float(np.mean(errors)) if errors else np.inf
        if mse < best_mse - 1e-12 or (abs(mse - best_mse) <= 1e-12 and
                                      best_lam is not None and lam > best_lam):
            best_lam, best_mse = lam, mse
    return best_lam if best_lam is not None else grid[0]


def fit_lasso(X: np.ndarray, y: np.ndarray, columns: list[str],
              lam: float | None = None, seed: int = 0) -> LinearModel:
    """Lasso by coordinate descent; lam=None selects it by internal 5-fold CV."""
    if lam is None:
        lam = select_lambda_cv(X, y, seed=seed)
    model = _fit_lasso_fixed(X, y, lam, columns)
    return model


def weighted_least_squares(Z: np.ndarray, y: np.ndarray,
                           weights: np.ndarray) -> tuple[np.ndarray, float]:
    """Weighted OLS with intercept; returns (coef, intercept)."""
    sw = np.sqrt(np.asarray(weights, float))
    A = np.column_stack([Z * sw[:, None], sw])
    sol, *_ = np.linalg.lstsq(A, y * sw, rcond=None)
    return sol[:-1], float(sol[-1])
