from .blup import BlupResult, VARIANCE_CAVEAT, blup
from .design import DesignMatrix, INTERCEPT, intercept_only
from .diagnostics import IntervalRow, get_outlier_fraction, interval_plot_data
from .distributions import chi2_quantile, chi2_upper_tail, normal_quantile, normal_two_sided_p
from .errors import (
    DegreesOfFreedomError,
    ModelError,
    NoCovariatesError,
    RankDeficientDesignError,
    SampleMismatchError,
)
from .fit import (
    BettaFit,
    FitControl,
    IterationRecord,
    create_fit_control,
    fit,
    fixed_point_step,
    grid_search_sigma2,
)
from .hypothesis import TestKind, TestResult, global_test, marginal_test, q_test
from .likelihood import gls_beta, loglik, profile_reml_loglik, reml_loglik

__all__ = [
    "BettaFit",
    "BlupResult",
    "DegreesOfFreedomError",
    "DesignMatrix",
    "FitControl",
    "INTERCEPT",
    "IntervalRow",
    "IterationRecord",
    "ModelError",
    "NoCovariatesError",
    "RankDeficientDesignError",
    "SampleMismatchError",
    "TestKind",
    "TestResult",
    "VARIANCE_CAVEAT",
    "blup",
    "chi2_quantile",
    "chi2_upper_tail",
    "create_fit_control",
    "fit",
    "fixed_point_step",
    "get_outlier_fraction",
    "gls_beta",
    "global_test",
    "grid_search_sigma2",
    "intercept_only",
    "interval_plot_data",
    "loglik",
    "marginal_test",
    "normal_quantile",
    "normal_two_sided_p",
    "profile_reml_loglik",
    "q_test",
    "reml_loglik",
]
