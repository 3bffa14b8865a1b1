import logging
import os
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize_scalar
from sklearn.linear_model import LinearRegression

from estimation import RichnessEstimate

from .design import DesignMatrix
from .errors import RankDeficientDesignError, SampleMismatchError
from .likelihood import profile_reml_loglik

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERATIONS = 1000
GRID_POINTS = 201

FIXED_POINT = "fixed-point"
GRID_SEARCH = "grid-search"
SATURATED = "saturated"


def get_fit_tolerance() -> float:
    return float(os.environ.get("BETTA_TOL", DEFAULT_TOLERANCE))


def get_fit_max_iterations() -> int:
    return int(os.environ.get("BETTA_MAX_ITER", DEFAULT_MAX_ITERATIONS))


@dataclass(frozen=True)
class FitControl:
    tol: float = DEFAULT_TOLERANCE
    max_iter: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")


def create_fit_control(
    tol: Optional[float] = None, max_iter: Optional[int] = None
) -> FitControl:
    return FitControl(
        tol=tol if tol is not None else get_fit_tolerance(),
        max_iter=max_iter if max_iter is not None else get_fit_max_iterations(),
    )


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    reml_loglik: float
    sigma2_u: float


@dataclass(frozen=True, eq=False)
class BettaFit:
    """
    Restricted maximum likelihood fit of ``C = X beta + U + e``
    """

    beta_hat: np.ndarray
    sigma2_u_hat: float
    cov_beta: np.ndarray
    weights: np.ndarray
    residuals: np.ndarray
    converged: bool
    iterations: int
    c_hat: np.ndarray
    se: np.ndarray
    design: DesignMatrix
    method: str
    reml_loglik: float
    trace: Tuple[IterationRecord, ...] = ()

    @property
    def sample_ids(self) -> Tuple[str, ...]:
        return self.design.sample_ids

    @property
    def column_names(self) -> Tuple[str, ...]:
        return self.design.column_names

    @property
    def fitted(self) -> np.ndarray:
        return self.design.values @ self.beta_hat

    @property
    def se_beta(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov_beta))

    @property
    def m(self) -> int:
        return self.design.rows

    @property
    def p(self) -> int:
        return self.design.p


def align_estimates(
    estimates: Sequence[RichnessEstimate], design: DesignMatrix
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Order the estimates as the design rows, matching them by sample id
    """
    by_id: Dict[str, RichnessEstimate] = {}
    for estimate in estimates:
        if estimate.sample_id in by_id:
            raise SampleMismatchError(f"duplicate estimate for sample '{estimate.sample_id}'")
        by_id[estimate.sample_id] = estimate
    missing = [s for s in design.sample_ids if s not in by_id]
    extra = sorted(set(by_id) - set(design.sample_ids))
    if missing or extra:
        raise SampleMismatchError(
            f"estimates and covariates do not match: without estimate {missing}, without covariates {extra}"
        )
    c_hat = np.array([by_id[s].c_hat for s in design.sample_ids], dtype=float)
    se = np.array([by_id[s].se for s in design.sample_ids], dtype=float)
    return c_hat, se


def fit(
    estimates: Sequence[RichnessEstimate],
    design: DesignMatrix,
    control: Optional[FitControl] = None,
) -> BettaFit:
    """
    Fit the richness regression by restricted maximum likelihood.

    Starting from the least squares coefficients and the empirical variance of
    the estimates, ``beta`` and ``sigma2_u`` are updated jointly by
    ``fixed_point_step`` until the relative change of both is below
    ``control.tol``. ``sigma2_u`` is clamped at zero. When the profile
    restricted likelihood falls on two successive steps, or when a grid over
    ``sigma2_u`` finds a better point than the converged one, the fit falls
    back to a grid search refined by a bounded scalar search.
    """
    control = control or create_fit_control()
    c_hat, se = align_estimates(estimates, design)
    X = design.values
    m, k = X.shape
    s2 = se ** 2

    if m == k:
        logging.warning(
            "No residual degrees of freedom: sigma2_u is not identifiable and is fixed at 0"
        )
        return _build_fit(c_hat, se, design, 0.0, True, 0, SATURATED, ())

    beta = least_squares_start(X, c_hat)
    sigma2 = float(np.var(c_hat, ddof=1))
    previous = _profile(sigma2, c_hat, se, X)
    trace = []
    converged = False
    method = FIXED_POINT
    decreases = 0
    for iteration in range(1, control.max_iter + 1):
        beta_next, sigma2_next = fixed_point_step(beta, sigma2, c_hat, s2, X)
        change = max(
            np.max(np.abs(beta_next - beta) / (1.0 + np.abs(beta_next))),
            abs(sigma2_next - sigma2) / (1.0 + sigma2_next),
        )
        beta, sigma2 = beta_next, sigma2_next
        current = _profile(sigma2, c_hat, se, X)
        trace.append(IterationRecord(iteration, current, sigma2))
        if change < control.tol:
            converged = True
            break
        decreases = decreases + 1 if current < previous - 1e-12 * (1 + abs(previous)) else 0
        previous = current
        if decreases >= 2:
            logging.warning(
                f"Fixed-point iterations oscillate at iteration {iteration}; falling back to a grid search"
            )
            sigma2 = grid_search_sigma2(c_hat, se, X)
            converged = True
            method = GRID_SEARCH
            break

    if not converged:
        logging.warning(
            f"REML fit did not converge after {control.max_iter} iterations "
            f"(sigma2_u={sigma2:.6g}); results are from the last iterate"
        )
    elif method == FIXED_POINT:
        candidate = grid_search_sigma2(c_hat, se, X)
        reached = _profile(sigma2, c_hat, se, X)
        if _profile(candidate, c_hat, se, X) > reached + 1e-9 * (1 + abs(reached)):
            logging.warning(
                f"Fixed point sigma2_u={sigma2:.6g} is not the global REML maximum; "
                f"using grid search value {candidate:.6g}"
            )
            sigma2 = candidate
            method = GRID_SEARCH

    result = _build_fit(c_hat, se, design, sigma2, converged, len(trace), method, tuple(trace))
    logging.debug(
        f"REML fit ({result.method}) converged={result.converged} after {result.iterations} "
        f"iterations: sigma2_u={result.sigma2_u_hat:.6g}, l_R={result.reml_loglik:.6g}"
    )
    return result


def least_squares_start(X: np.ndarray, c_hat: np.ndarray) -> np.ndarray:
    regression = LinearRegression(fit_intercept=False).fit(X, c_hat)
    return np.asarray(regression.coef_, dtype=float)


def fixed_point_step(
    beta: np.ndarray, sigma2: float, c_hat: np.ndarray, s2: np.ndarray, X: np.ndarray
) -> Tuple[np.ndarray, float]:
    """
    One joint update from ``(beta_s, sigma2_s)``:

        beta_{s+1}   = (sum w x x')^-1 sum w x C
        sigma2_{s+1} = (sum w^2)^-1 [sum w^2 ((C - x'beta_s)^2 - s2_i) + G(sigma2_s)]
        G(sigma2)    = tr((sum w x x')^-1 sum w^2 x x')

    with ``w_i = 1 / (sigma2_s + s2_i)``. The normalizer ``sum w^2`` makes the
    fixed point solve the REML score equation ``sum w^2 r^2 = sum w - G``.
    """
    weights = 1.0 / (sigma2 + s2)
    factor = _cholesky(X.T @ (weights[:, None] * X))
    beta_next = cho_solve(factor, X.T @ (weights * c_hat))
    residuals = c_hat - X @ beta
    squared = weights ** 2
    g = np.trace(cho_solve(factor, X.T @ (squared[:, None] * X)))
    sigma2_next = (np.sum(squared * (residuals ** 2 - s2)) + g) / np.sum(squared)
    return beta_next, max(float(sigma2_next), 0.0)


def sigma2_grid(c_hat: np.ndarray, se: np.ndarray) -> np.ndarray:
    """
    Zero plus log-spaced points spanning the plausible scale of ``sigma2_u``
    """
    scale = max(float(np.var(c_hat, ddof=1)), float(np.mean(se ** 2)), 1e-12)
    return np.concatenate([[0.0], np.geomspace(scale * 1e-6, scale * 1e3, GRID_POINTS)])


def grid_search_sigma2(c_hat: np.ndarray, se: np.ndarray, X: np.ndarray) -> float:
    grid = sigma2_grid(c_hat, se)
    values = profile_reml_loglik(grid, c_hat, se, X)
    best = int(np.argmax(values))
    low, high = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    refined = minimize_scalar(
        lambda s: -_profile(s, c_hat, se, X),
        bounds=(low, high),
        method="bounded",
        options={"xatol": 1e-10 * max(high, 1e-12)},
    )
    if refined.success and -refined.fun > values[best]:
        return float(refined.x)
    return float(grid[best])


def _profile(sigma2: float, c_hat: np.ndarray, se: np.ndarray, X: np.ndarray) -> float:
    return float(profile_reml_loglik(sigma2, c_hat, se, X)[0])


def _cholesky(matrix: np.ndarray):
    try:
        return cho_factor(matrix)
    except LinAlgError as e:
        raise RankDeficientDesignError(f"weighted normal equations are singular: {e}") from e


def _build_fit(
    c_hat: np.ndarray,
    se: np.ndarray,
    design: DesignMatrix,
    sigma2: float,
    converged: bool,
    iterations: int,
    method: str,
    trace: Tuple[IterationRecord, ...],
) -> BettaFit:
    X = design.values
    weights = 1.0 / (sigma2 + se ** 2)
    factor = _cholesky(X.T @ (weights[:, None] * X))
    beta = cho_solve(factor, X.T @ (weights * c_hat))
    cov_beta = cho_solve(factor, np.eye(X.shape[1]))
    cov_beta = (cov_beta + cov_beta.T) / 2
    residuals = c_hat - X @ beta
    arrays = [beta, cov_beta, weights, residuals, c_hat, se]
    for array in arrays:
        array.setflags(write=False)
    return BettaFit(
        beta_hat=beta,
        sigma2_u_hat=float(sigma2),
        cov_beta=cov_beta,
        weights=weights,
        residuals=residuals,
        converged=converged,
        iterations=iterations,
        c_hat=c_hat,
        se=se,
        design=design,
        method=method,
        reml_loglik=_profile(sigma2, c_hat, se, X),
        trace=trace,
    )
