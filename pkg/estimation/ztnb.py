import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import chdtri, digamma, gammaln, lambertw, polygamma

from frequency_data import FrequencyCountTable

from .estimate import (
    EstimateMethod,
    EstimateUnstableError,
    EstimationError,
    InsufficientDataError,
    RichnessEstimate,
    tight_se_warnings,
)
from .interfaces import RichnessEstimatorInterface


MIN_OBSERVED_RICHNESS = 10
MIN_DISTINCT_FREQUENCIES = 2
MAX_ITERATIONS = 500
RELATIVE_TOLERANCE = 1e-10
# A fitted zero class this close to one means almost everything is unseen.
UNSTABLE_ZERO_PROBABILITY = 1.0 - 1e-6

# Bounds on (log size, logit prob); the upper size bound is the Poisson limit.
LOG_SIZE_BOUNDS = (np.log(1e-3), np.log(1e8))
LOGIT_PROB_BOUNDS = (-20.0, 35.0)
START_PERTURBATION = np.array([0.5, 0.5])
# The Poisson limit lies on the boundary of the size range: one-sided test.
OVERDISPERSION_LEVEL = 0.05
OVERDISPERSION_CRITICAL_VALUE = float(chdtri(1, 2 * OVERDISPERSION_LEVEL))


@dataclass(frozen=True)
class ZtnbFit:
    """
    Maximum likelihood fit of a zero-truncated negative binomial
    """

    size: float
    prob: float
    zero_probability: float
    loglik: float
    theta: Tuple[float, float]
    trace: List[Dict] = field(default_factory=list)
    overdispersion_statistic: float = 0.0

    @property
    def is_overdispersed(self) -> bool:
        return self.overdispersion_statistic > OVERDISPERSION_CRITICAL_VALUE


class ZeroTruncatedNegativeBinomialEstimator(RichnessEstimatorInterface):
    """
    Fits NB(size, prob), ``P(X = k) = C(k + r - 1, k) p^r (1 - p)^k``, to the
    observed abundances conditioned on being positive, and estimates the total
    richness as ``c / (1 - p0)`` where ``p0 = p^r`` is the fitted zero class.

    The standard error follows the delta method:

        Var(C) = C p0 / (1 - p0) + g' I^+ g,   g = c grad(p0) / (1 - p0)^2

    where ``I`` is the observed information of the truncated likelihood in
    (log size, logit prob) and ``I^+`` its inverse on the positive eigenspace.
    Unless the fit improves significantly on its Poisson limit (likelihood
    ratio above ``OVERDISPERSION_CRITICAL_VALUE``), the size is held at its
    fitted value and only the logit prob block of ``I`` enters the variance.
    """

    def estimate(self, table: FrequencyCountTable) -> RichnessEstimate:
        self.check_table_is_identifiable(table)
        fit = self.fit(table)
        c = table.observed_richness
        p0 = fit.zero_probability
        if not p0 < UNSTABLE_ZERO_PROBABILITY:
            raise EstimateUnstableError(
                f"estimate unstable for sample '{table.sample_id}': fitted zero class {p0}",
                fit.trace,
            )
        c_hat = c / (1.0 - p0)
        se = np.sqrt(self._variance(table, fit, c_hat))
        if not np.isfinite(c_hat) or not np.isfinite(se) or se <= 0:
            raise EstimateUnstableError(
                f"estimate unstable for sample '{table.sample_id}': C={c_hat}, se={se}",
                fit.trace,
            )
        warnings = tight_se_warnings(c_hat, se)
        if warnings:
            logging.warning(
                f"Standard error of sample '{table.sample_id}' is suspiciously tight: {se}"
            )
        logging.debug(
            f"Sample '{table.sample_id}': size={fit.size:.6g} prob={fit.prob:.6g} "
            f"p0={p0:.6g} C={c_hat:.6g} se={se:.6g}"
        )
        return RichnessEstimate(
            sample_id=table.sample_id,
            c_hat=float(c_hat),
            se=float(se),
            c_obs=c,
            method=EstimateMethod.ZTNB_MLE,
            warnings=warnings,
        )

    def check_table_is_identifiable(self, table: FrequencyCountTable) -> None:
        if table.distinct_frequencies() < MIN_DISTINCT_FREQUENCIES:
            raise InsufficientDataError(
                f"sample '{table.sample_id}' needs at least {MIN_DISTINCT_FREQUENCIES} distinct frequencies"
            )
        if table.observed_richness < MIN_OBSERVED_RICHNESS:
            raise InsufficientDataError(
                f"sample '{table.sample_id}' needs an observed richness of at least {MIN_OBSERVED_RICHNESS}"
            )

    def fit(self, table: FrequencyCountTable) -> ZtnbFit:
        j = table.frequencies()
        f = table.counts()
        trace = []
        best = None
        for start_index, start in enumerate(initial_points(j, f)):
            result = minimize(
                negative_truncated_loglik,
                start,
                args=(j, f),
                jac=negative_truncated_loglik_gradient,
                method="L-BFGS-B",
                bounds=[LOG_SIZE_BOUNDS, LOGIT_PROB_BOUNDS],
                options={"maxiter": MAX_ITERATIONS, "ftol": RELATIVE_TOLERANCE},
            )
            trace.append(
                {
                    "start": start_index,
                    "theta0": [float(x) for x in start],
                    "theta": [float(x) for x in result.x],
                    "status": int(result.status),
                    "message": str(result.message),
                    "iterations": int(result.nit),
                    "negative_loglik": float(result.fun),
                }
            )
            # status 2 is a line search that can make no further progress
            if result.status not in (0, 2) or not np.isfinite(result.fun):
                continue
            if best is None or result.fun < best.fun:
                best = result
        if best is None:
            raise EstimationError(
                f"optimizer did not converge for sample '{table.sample_id}' after {MAX_ITERATIONS} iterations",
                trace,
            )
        log_size, logit_prob = best.x
        size = float(np.exp(log_size))
        log_prob = _log_prob(logit_prob)
        loglik = float(-best.fun - np.sum(f * gammaln(j + 1)))
        return ZtnbFit(
            size=size,
            prob=float(np.exp(log_prob)),
            zero_probability=float(np.exp(size * log_prob)),
            loglik=loglik,
            theta=(float(log_size), float(logit_prob)),
            trace=trace,
            overdispersion_statistic=max(0.0, 2.0 * (loglik - poisson_limit_loglik(j, f))),
        )

    def _variance(self, table: FrequencyCountTable, fit: ZtnbFit, c_hat: float) -> float:
        j = table.frequencies()
        f = table.counts()
        _, logit_prob = fit.theta
        r, p0 = fit.size, fit.zero_probability
        q = np.exp(_log_one_minus_prob(logit_prob))
        gradient_p0 = p0 * np.array([r * _log_prob(logit_prob), r * q])
        g = table.observed_richness * gradient_p0 / (1.0 - p0) ** 2
        information = observed_information(np.array(fit.theta), j, f)
        if fit.is_overdispersed:
            parameter_variance = g @ positive_part_inverse(information) @ g
        else:
            parameter_variance = g[1] ** 2 * positive_part_inverse(information[1:, 1:])[0, 0]
        completion = c_hat * p0 / (1.0 - p0)
        return float(completion + parameter_variance)


def initial_points(j: np.ndarray, f: np.ndarray) -> List[np.ndarray]:
    """
    Method-of-moments start on the observed abundances plus two perturbed copies
    """
    mean = np.sum(f * j) / np.sum(f)
    variance = np.sum(f * (j - mean) ** 2) / np.sum(f)
    size = mean ** 2 / (variance - mean) if variance > mean * (1 + 1e-6) else 1000.0
    prob = size / (size + mean)
    center = np.array([np.log(size), np.log(prob) - np.log1p(-prob)])
    lower = np.array([LOG_SIZE_BOUNDS[0], LOGIT_PROB_BOUNDS[0]])
    upper = np.array([LOG_SIZE_BOUNDS[1], LOGIT_PROB_BOUNDS[1]])
    return [
        np.clip(point, lower, upper)
        for point in (center, center + START_PERTURBATION, center - START_PERTURBATION)
    ]


def _log_prob(logit_prob: float) -> float:
    return -np.logaddexp(0.0, -logit_prob)


def _log_one_minus_prob(logit_prob: float) -> float:
    return -np.logaddexp(0.0, logit_prob)


def negative_truncated_loglik(theta: np.ndarray, j: np.ndarray, f: np.ndarray) -> float:
    """
    Negative zero-truncated NB log-likelihood, without the ``log j!`` constant
    """
    log_size, logit_prob = theta
    r = np.exp(log_size)
    log_p = _log_prob(logit_prob)
    log_q = _log_one_minus_prob(logit_prob)
    log_nonzero = np.log(-np.expm1(r * log_p))
    terms = gammaln(j + r) - gammaln(r) + r * log_p + j * log_q - log_nonzero
    return float(-np.sum(f * terms))


def zero_odds(log_p0: float) -> float:
    """
    ``p0 / (1 - p0)`` from ``log p0 <= 0``, finite for any size
    """
    return np.exp(log_p0) / -np.expm1(log_p0)


def negative_truncated_loglik_gradient(
    theta: np.ndarray, j: np.ndarray, f: np.ndarray
) -> np.ndarray:
    log_size, logit_prob = theta
    r = np.exp(log_size)
    log_p = _log_prob(logit_prob)
    p = np.exp(log_p)
    q = np.exp(_log_one_minus_prob(logit_prob))
    odds = zero_odds(r * log_p)
    d_size = digamma(j + r) - digamma(r) + log_p + odds * log_p
    d_logit = r * q - j * p + odds * r * q
    return -np.array([np.sum(f * d_size) * r, np.sum(f * d_logit)])


def observed_information(theta: np.ndarray, j: np.ndarray, f: np.ndarray) -> np.ndarray:
    """
    Analytic Hessian of the negative truncated log-likelihood in
    (log size, logit prob).

    Per observation the log-likelihood is
    ``lgamma(j + r) - lgamma(r) + L + j log q - log(1 - e^L)`` with
    ``L = r log p = log p0``, whose second derivative in ``L`` is ``u (1 + u)``
    for the zero odds ``u``.
    """
    log_size, logit_prob = theta
    r = np.exp(log_size)
    log_p = _log_prob(logit_prob)
    p = np.exp(log_p)
    q = np.exp(_log_one_minus_prob(logit_prob))
    n = np.sum(f)
    log_p0 = r * log_p
    u = zero_odds(log_p0)
    # derivatives of L in log size and logit prob
    slope = np.array([log_p0, r * q])
    curvature = np.array([[log_p0, r * q], [r * q, -r * p * q]])
    lgamma_ratio = np.sum(
        f
        * (
            r * (digamma(j + r) - digamma(r))
            + r ** 2 * (polygamma(1, j + r) - polygamma(1, r))
        )
    )
    hessian = n * ((1.0 + u) * curvature + u * (1.0 + u) * np.outer(slope, slope))
    hessian[0, 0] += lgamma_ratio
    hessian[1, 1] -= np.sum(f * j) * p * q
    return -hessian


def poisson_limit_loglik(j: np.ndarray, f: np.ndarray) -> float:
    """
    Zero-truncated Poisson log-likelihood at its maximum, the limit of the
    negative binomial fit as the size grows without bound.

    The rate solves ``lambda / (1 - exp(-lambda)) = mean`` and is
    ``mean + W(-mean exp(-mean))`` on the principal Lambert branch.
    """
    mean = np.sum(f * j) / np.sum(f)
    rate = mean + float(np.real(lambertw(-mean * np.exp(-mean))))
    terms = j * np.log(rate) - rate - np.log(-np.expm1(-rate)) - gammaln(j + 1)
    return float(np.sum(f * terms))


def positive_part_inverse(matrix: np.ndarray, relative_cutoff: float = 1e-10) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    cutoff = relative_cutoff * max(np.max(np.abs(values)), np.finfo(float).tiny)
    inverse = np.array([1.0 / v if v > cutoff else 0.0 for v in values])
    return (vectors * inverse) @ vectors.T
