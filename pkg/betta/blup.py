from dataclasses import dataclass

import numpy as np

from .fit import BettaFit

VARIANCE_CAVEAT = (
    "Prediction variances treat sigma2_u and the standard errors as known and "
    "may underestimate the true sampling variability when the design is "
    "unbalanced and no replicates are available."
)


@dataclass(frozen=True, eq=False)
class BlupResult:
    u_star: np.ndarray
    c_star: np.ndarray
    var_c_star: np.ndarray
    fitted: np.ndarray
    shrinkage: np.ndarray
    caveat: str = VARIANCE_CAVEAT

    @property
    def se_c_star(self) -> np.ndarray:
        return np.sqrt(self.var_c_star)


def blup(fit: BettaFit) -> BlupResult:
    """
    Shrinkage richness estimates from the best linear unbiased predictor of
    the random effects:

        lambda_i = sigma2_u / (se_i^2 + sigma2_u)
        U*_i     = lambda_i (C_i - x_i'beta)
        C*_i     = x_i'beta + U*_i

    The prediction variance is the mixed model prediction error variance with
    ``beta`` estimated by weighted least squares:

        Var(C*_i) = lambda_i se_i^2 + (1 - lambda_i)^2 x_i' Var(beta) x_i

    See ``VARIANCE_CAVEAT``.
    """
    X = fit.design.values
    s2 = fit.se ** 2
    if fit.sigma2_u_hat > 0:
        shrinkage = fit.sigma2_u_hat / (s2 + fit.sigma2_u_hat)
    else:
        shrinkage = np.zeros_like(s2)
    fitted = X @ fit.beta_hat
    u_star = shrinkage * fit.residuals
    c_star = fitted + u_star
    leverage = np.einsum("ij,jk,ik->i", X, fit.cov_beta, X)
    var_c_star = shrinkage * s2 + (1.0 - shrinkage) ** 2 * leverage
    return BlupResult(
        u_star=u_star,
        c_star=c_star,
        var_c_star=var_c_star,
        fitted=fitted,
        shrinkage=shrinkage,
    )
