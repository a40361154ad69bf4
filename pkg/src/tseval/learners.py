"""Regression learners behind a single fit/predict contract.

Two learners: an L1-penalised linear model solved by cyclic coordinate
descent on internally standardized predictors, and k-nearest-neighbours
averaging. Both are deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LearnerSpec",
    "FittedModel",
    "fit",
    "predict",
    "lambda_max",
    "kkt_violation",
]


@dataclass(frozen=True)
class LearnerSpec:
    """Declarative learner configuration.

    ``lam`` is the L1 penalty on standardized predictors; ``None`` picks
    0.01 * lambda_max of the training fold, so the model is close to an
    ordinary least-squares fit without ever being ill-posed.
    """

    kind: str = "lasso"
    lam: float | None = None
    k: int = 5
    max_iter: int = 1000
    tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.kind not in ("lasso", "knn"):
            raise ValueError(f"unknown learner kind {self.kind!r}")
        if self.lam is not None and self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True, eq=False)
class FittedModel:
    kind: str
    p: int
    # lasso
    coefficients: np.ndarray | None = None
    intercept: float = 0.0
    std_coefficients: np.ndarray | None = None
    column_means: np.ndarray | None = None
    column_scales: np.ndarray | None = None
    lam: float = 0.0
    # knn
    train_predictors: np.ndarray | None = None
    train_targets: np.ndarray | None = None
    k: int = 0


def _validate_xy(predictors, targets) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(predictors, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise ValueError(f"{X.shape[0]} predictor rows but {y.size} targets")
    if y.size == 0:
        raise ValueError("empty training set")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training values")
    return X, y


def lambda_max(predictors, targets) -> float:
    """Smallest penalty that zeroes every coefficient: max_j |<x_j, y>| / n
    on standardized predictors and centered targets."""
    X, y = _validate_xy(predictors, targets)
    Xs, _, _ = _standardize(X)
    yc = y - y.mean()
    if Xs.shape[0] < 2:
        return 0.0
    return float(np.max(np.abs(Xs.T @ yc)) / y.size) if Xs.size else 0.0


def _standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    safe = np.where(sigma > 0, sigma, 1.0)
    return (X - mu) / safe, mu, sigma


def _fit_lasso(spec: LearnerSpec, X: np.ndarray, y: np.ndarray) -> FittedModel:
    n, p = X.shape
    Xs, mu, sigma = _standardize(X)
    live = sigma > 0
    ybar = float(y.mean())
    if n < 2 or not live.any():
        return FittedModel(
            kind="lasso",
            p=p,
            coefficients=np.zeros(p),
            intercept=ybar,
            std_coefficients=np.zeros(p),
            column_means=mu,
            column_scales=np.where(live, sigma, 1.0),
            lam=spec.lam or 0.0,
        )
    yc = y - ybar
    lam = spec.lam
    if lam is None:
        lam = 0.01 * float(np.max(np.abs(Xs.T @ yc)) / n)

    G = (Xs.T @ Xs) / n
    c = (Xs.T @ yc) / n
    beta = np.zeros(p)
    order = np.flatnonzero(live)
    diag = G.diagonal().copy()
    converged = False
    for _ in range(spec.max_iter):
        max_delta = 0.0
        for j in order:
            rho = c[j] - G[j] @ beta + diag[j] * beta[j]
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / diag[j]
            delta = abs(new - beta[j])
            if delta > max_delta:
                max_delta = delta
            beta[j] = new
        if max_delta < spec.tol:
            grad = c - G @ beta
            active = beta != 0
            viol = 0.0
            if active.any():
                viol = float(np.max(np.abs(np.abs(grad[active]) - lam)))
            inactive = live & ~active
            if inactive.any():
                viol = max(viol, float(np.max(np.abs(grad[inactive]) - lam, initial=0.0)))
            if viol <= 10.0 * spec.tol:
                converged = True
                break
    if not converged:
        warnings.warn(
            f"coordinate descent did not meet tol={spec.tol:g} within "
            f"max_iter={spec.max_iter}",
            stacklevel=3,
        )
    scales = np.where(live, sigma, 1.0)
    coef = beta / scales
    return FittedModel(
        kind="lasso",
        p=p,
        coefficients=coef,
        intercept=ybar - float(coef @ mu),
        std_coefficients=beta,
        column_means=mu,
        column_scales=scales,
        lam=lam,
    )


def fit(spec: LearnerSpec, predictors, targets) -> FittedModel:
    """Train a learner; see :class:`LearnerSpec` for the configuration."""
    X, y = _validate_xy(predictors, targets)
    if spec.kind == "knn":
        if X.shape[0] < spec.k:
            raise ValueError(
                f"knn with k={spec.k} needs at least {spec.k} training rows, "
                f"got {X.shape[0]}"
            )
        return FittedModel(
            kind="knn",
            p=X.shape[1],
            train_predictors=X.copy(),
            train_targets=y.copy(),
            k=spec.k,
        )
    return _fit_lasso(spec, X, y)


def predict(model: FittedModel, predictors) -> np.ndarray:
    """Predict targets for an m x p matrix of predictor rows."""
    X = np.atleast_2d(np.asarray(predictors, dtype=float))
    if X.shape[1] != model.p:
        raise ValueError(f"model expects {model.p} predictors, got {X.shape[1]}")
    if model.kind == "lasso":
        return X @ model.coefficients + model.intercept
    diff = X[:, None, :] - model.train_predictors[None, :, :]
    dist = np.einsum("mnp,mnp->mn", diff, diff)
    nearest = np.argsort(dist, axis=1, kind="stable")[:, : model.k]
    return model.train_targets[nearest].mean(axis=1)


def kkt_violation(model: FittedModel, predictors, targets) -> float:
    """Worst stationarity residual of a lasso fit on its training data.

    For active coefficients the standardized-gradient magnitude must equal
    the penalty; for inactive ones it must not exceed it.
    """
    if model.kind != "lasso":
        raise ValueError("KKT residual is defined for lasso models only")
    X, y = _validate_xy(predictors, targets)
    Xs = (X - model.column_means) / model.column_scales
    r = (y - y.mean()) - Xs @ model.std_coefficients
    grad = Xs.T @ r / y.size
    live = X.std(axis=0) > 0
    active = model.std_coefficients != 0
    viol = 0.0
    if active.any():
        viol = float(np.max(np.abs(np.abs(grad[active]) - model.lam)))
    inactive = live & ~active
    if inactive.any():
        viol = max(viol, float(np.max(np.abs(grad[inactive]) - model.lam, initial=0.0)))
    return viol
