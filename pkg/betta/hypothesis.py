import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .distributions import chi2_upper_tail, normal_two_sided_p
from .errors import DegreesOfFreedomError, ModelError, NoCovariatesError
from .fit import BettaFit


class TestKind(str, enum.Enum):
    __test__ = False

    MARGINAL_WALD = "marginal_wald"
    GLOBAL_CHISQ = "global_chisq"
    HOMOGENEITY_Q = "homogeneity_q"


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    df: Optional[int]
    p_value: float
    kind: TestKind
    coefficient: Optional[str] = None

    def rejects(self, level: float = 0.05) -> bool:
        return self.p_value < level


def marginal_test(fit: BettaFit, j: Union[int, str]) -> TestResult:
    """
    Wald test of ``beta_j = 0`` with ``z = beta_j / sqrt(Var(beta)_jj)``
    against a standard normal, two-sided
    """
    index = fit.design.column_index(j) if isinstance(j, str) else int(j)
    if not 0 <= index < len(fit.beta_hat):
        raise ModelError(f"coefficient index {j} is outside 0..{len(fit.beta_hat) - 1}")
    z = float(fit.beta_hat[index] / np.sqrt(fit.cov_beta[index, index]))
    return TestResult(
        statistic=z,
        df=None,
        p_value=normal_two_sided_p(z),
        kind=TestKind.MARGINAL_WALD,
        coefficient=fit.column_names[index],
    )


def global_test(fit: BettaFit) -> TestResult:
    """
    Test of ``beta_1 = ... = beta_p = 0`` with the statistic

        b' X' W^-1 X b

    where ``b`` drops the intercept coefficient, ``X`` drops the intercept
    column and ``W = diag(se_i^2 + sigma2_u)``, against a chi-square with ``p``
    degrees of freedom.

    Notes
    -----
    This is not the Wald form ``b' [Var(beta)_{-1,-1}]^-1 b``; the two agree
    only when the covariates are W-orthogonal to the intercept column.
    """
    p = fit.p
    if p < 1:
        raise NoCovariatesError("no non-intercept covariates")
    coefficients = fit.beta_hat[1:]
    X = fit.design.without_intercept()
    information = X.T @ (fit.weights[:, None] * X)
    statistic = float(coefficients @ information @ coefficients)
    return TestResult(
        statistic=statistic,
        df=p,
        p_value=chi2_upper_tail(statistic, p),
        kind=TestKind.GLOBAL_CHISQ,
    )


def q_test(fit: BettaFit) -> TestResult:
    """
    Homogeneity test of ``sigma2_u = 0`` with

        Q = sum_i (C_i - x_i'beta)^2 / se_i^2

    against a chi-square with ``m - p - 1`` degrees of freedom. The
    denominator is the sampling variance alone, not ``se_i^2 + sigma2_u``.
    """
    df = fit.m - fit.p - 1
    if df < 1:
        raise DegreesOfFreedomError(
            f"homogeneity test needs m - p - 1 >= 1, got {df} (m={fit.m}, p={fit.p})"
        )
    statistic = float(np.sum(fit.residuals ** 2 / fit.se ** 2))
    return TestResult(
        statistic=statistic,
        df=df,
        p_value=chi2_upper_tail(statistic, df),
        kind=TestKind.HOMOGENEITY_Q,
    )
