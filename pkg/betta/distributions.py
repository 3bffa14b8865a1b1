import numpy as np
from scipy.special import chdtri, erfc, gammaincc, ndtri


def normal_two_sided_p(z: float) -> float:
    """
    Two-sided standard normal tail probability ``P(|Z| >= |z|)``
    """
    return float(erfc(abs(z) / np.sqrt(2.0)))


def chi2_upper_tail(statistic: float, df: int) -> float:
    """
    Upper tail probability of a chi-square with ``df`` degrees of freedom,
    the regularized upper incomplete gamma ``Q(df / 2, x / 2)``
    """
    if statistic <= 0:
        return 1.0
    return float(gammaincc(df / 2.0, statistic / 2.0))


def chi2_quantile(level: float, df: int) -> float:
    """
    Value exceeded with probability ``1 - level`` by a chi-square with ``df``
    degrees of freedom
    """
    return float(chdtri(df, 1.0 - level))


def normal_quantile(level: float) -> float:
    return float(ndtri(level))
