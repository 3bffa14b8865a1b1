import enum
import math
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

# Estimates whose standard error is below this fraction of the estimate are
# flagged as suspiciously tight.
TIGHT_SE_FRACTION = 1e-6
TIGHT_SE_WARNING = "tight-se"


class EstimateMethod(str, enum.Enum):
    ZTNB_MLE = "ztnb-mle"
    CHAO_TYPE = "chao-type"
    EXTERNAL = "external"


class EstimationError(Exception):
    """
    Raised when a richness estimate cannot be produced
    """

    def __init__(self, message: str, trace: Optional[List[Any]] = None):
        super().__init__(message)
        self.trace = trace or []


class InsufficientDataError(EstimationError):
    pass


class EstimateUnstableError(EstimationError):
    pass


class ExternalEstimateError(EstimationError, ValueError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


@dataclass(frozen=True)
class RichnessEstimate:
    """
    Total richness estimate ``c_hat`` of one sample with standard error ``se``
    """

    sample_id: str
    c_hat: float
    se: float
    c_obs: Optional[int]
    method: EstimateMethod
    warnings: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not math.isfinite(self.c_hat):
            raise EstimationError(f"estimate for '{self.sample_id}' is not finite")
        if not math.isfinite(self.se) or self.se <= 0:
            raise EstimationError(
                f"standard error for '{self.sample_id}' must be finite and positive, got {self.se}"
            )
        if self.c_obs is not None and self.c_hat < self.c_obs:
            raise EstimationError(
                f"estimate {self.c_hat} for '{self.sample_id}' is below the observed richness {self.c_obs}"
            )

    @property
    def variance(self) -> float:
        return self.se ** 2


def tight_se_warnings(c_hat: float, se: float) -> Tuple[str, ...]:
    if se < TIGHT_SE_FRACTION * abs(c_hat):
        return (TIGHT_SE_WARNING,)
    return ()
