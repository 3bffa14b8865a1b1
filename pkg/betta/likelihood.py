from typing import Sequence, Tuple, Union

import numpy as np

from estimation import RichnessEstimate

from .design import DesignMatrix

Estimates = Union[Sequence[RichnessEstimate], Sequence[Tuple[float, float]], np.ndarray]


def estimate_arrays(estimates: Estimates) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split estimates, or ``(c_hat, se)`` pairs, into the arrays of estimates and
    standard errors
    """
    if len(estimates) and isinstance(estimates[0], RichnessEstimate):
        c_hat = np.array([e.c_hat for e in estimates], dtype=float)
        se = np.array([e.se for e in estimates], dtype=float)
    else:
        pairs = np.array(estimates, dtype=float, ndmin=2)
        c_hat, se = pairs[:, 0], pairs[:, 1]
    if np.any(se <= 0):
        raise ValueError("standard errors must be positive")
    return c_hat, se


def design_values(design: Union[DesignMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(design, DesignMatrix):
        return design.values
    return np.array(design, dtype=float, ndmin=2)


def loglik(
    beta: Sequence[float],
    sigma2_u: float,
    estimates: Estimates,
    design: Union[DesignMatrix, np.ndarray],
) -> float:
    """
    Log-likelihood ``-1/2 sum_i [ln(s2_u + s2_i) + (C_i - x_i'b)^2 / (s2_u + s2_i)]``
    with the standard errors standing in for the sampling deviations
    """
    c_hat, se = estimate_arrays(estimates)
    X = design_values(design)
    if sigma2_u < 0:
        raise ValueError(f"sigma2_u must be non-negative, got {sigma2_u}")
    variance = sigma2_u + se ** 2
    residuals = c_hat - X @ np.asarray(beta, dtype=float)
    return float(-0.5 * np.sum(np.log(variance) + residuals ** 2 / variance))


def reml_loglik(
    beta: Sequence[float],
    sigma2_u: float,
    estimates: Estimates,
    design: Union[DesignMatrix, np.ndarray],
) -> float:
    """
    Restricted log-likelihood: ``loglik`` minus half the log-determinant of
    ``sum_i x_i x_i' / (s2_u + s2_i)``
    """
    c_hat, se = estimate_arrays(estimates)
    X = design_values(design)
    value = loglik(beta, sigma2_u, np.column_stack([c_hat, se]), X)
    weights = 1.0 / (sigma2_u + se ** 2)
    _, logdet = np.linalg.slogdet(X.T @ (weights[:, None] * X))
    return float(value - 0.5 * logdet)


def gls_beta(sigma2_u: float, c_hat: np.ndarray, se: np.ndarray, X: np.ndarray) -> np.ndarray:
    """
    Weighted least squares coefficients for weights ``1 / (s2_u + s2_i)``
    """
    weights = 1.0 / (sigma2_u + se ** 2)
    return np.linalg.solve(X.T @ (weights[:, None] * X), X.T @ (weights * c_hat))


def profile_reml_loglik(
    sigma2_values: Union[float, Sequence[float], np.ndarray],
    c_hat: np.ndarray,
    se: np.ndarray,
    X: np.ndarray,
) -> np.ndarray:
    """
    Restricted log-likelihood at each ``sigma2_u`` with ``beta`` profiled out by
    weighted least squares, evaluated for the whole grid at once
    """
    sigma2 = np.atleast_1d(np.asarray(sigma2_values, dtype=float))
    variance = sigma2[:, None] + (se ** 2)[None, :]
    weights = 1.0 / variance
    information = np.einsum("gi,ij,ik->gjk", weights, X, X)
    score = np.einsum("gi,ij,i->gj", weights, X, c_hat)
    beta = np.linalg.solve(information, score[..., None])[..., 0]
    residuals = c_hat[None, :] - beta @ X.T
    _, logdet = np.linalg.slogdet(information)
    return -0.5 * (np.sum(np.log(variance) + residuals ** 2 * weights, axis=1) + logdet)
