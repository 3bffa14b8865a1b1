import os
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from estimation import RichnessEstimate

DEFAULT_OUTLIER_FRACTION = 0.1


def get_outlier_fraction() -> float:
    return float(os.environ.get("INTERVAL_OUTLIER_FRACTION", DEFAULT_OUTLIER_FRACTION))


@dataclass(frozen=True)
class IntervalRow:
    sample_id: str
    lower: float
    upper: float
    center: float
    tight: bool

    @property
    def width(self) -> float:
        return self.upper - self.lower


def interval_plot_data(
    estimates: Sequence[RichnessEstimate], outlier_fraction: Optional[float] = None
) -> List[IntervalRow]:
    """
    Error bars at two standard errors around each estimate. An interval
    narrower than ``outlier_fraction`` of the median width is flagged as tight:
    a tight interval, especially one far from the overall mean, is the visual
    sign of a sample that can dominate the fit.
    """
    if outlier_fraction is None:
        outlier_fraction = get_outlier_fraction()
    if not estimates:
        return []
    median_width = float(np.median([4.0 * e.se for e in estimates]))
    return [
        IntervalRow(
            sample_id=e.sample_id,
            lower=e.c_hat - 2.0 * e.se,
            upper=e.c_hat + 2.0 * e.se,
            center=e.c_hat,
            tight=4.0 * e.se < outlier_fraction * median_width,
        )
        for e in estimates
    ]
