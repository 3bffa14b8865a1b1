import os
from typing import Optional

from .chao import ChaoEstimator
from .estimate import (
    EstimateMethod,
    EstimateUnstableError,
    EstimationError,
    ExternalEstimateError,
    InsufficientDataError,
    RichnessEstimate,
    TIGHT_SE_WARNING,
)
from .external import load_external_estimates
from .interfaces import RichnessEstimatorInterface
from .ztnb import ZeroTruncatedNegativeBinomialEstimator, ZtnbFit


def get_richness_method() -> str:
    return os.environ.get("RICHNESS_METHOD", "ztnb")


def create_richness_estimator(method: Optional[str] = None) -> RichnessEstimatorInterface:
    """
    Factory method returning the estimator selected by ``method`` or, when not
    given, by the RICHNESS_METHOD environment variable
    """
    method = (method or get_richness_method()).lower()
    method_to_estimator_class = {
        "ztnb": ZeroTruncatedNegativeBinomialEstimator,
        EstimateMethod.ZTNB_MLE.value: ZeroTruncatedNegativeBinomialEstimator,
        "chao": ChaoEstimator,
        EstimateMethod.CHAO_TYPE.value: ChaoEstimator,
    }
    if method not in method_to_estimator_class:
        raise ValueError(
            f'Richness method "{method}" cannot be computed from frequency counts.'
        )
    return method_to_estimator_class[method]()


__all__ = [
    "ChaoEstimator",
    "EstimateMethod",
    "EstimateUnstableError",
    "EstimationError",
    "ExternalEstimateError",
    "InsufficientDataError",
    "RichnessEstimate",
    "RichnessEstimatorInterface",
    "TIGHT_SE_WARNING",
    "ZeroTruncatedNegativeBinomialEstimator",
    "ZtnbFit",
    "create_richness_estimator",
    "get_richness_method",
    "load_external_estimates",
]
