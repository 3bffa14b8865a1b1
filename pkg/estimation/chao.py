import logging
import math

from frequency_data import FrequencyCountTable

from .estimate import EstimateMethod, RichnessEstimate, tight_se_warnings
from .interfaces import RichnessEstimatorInterface


class ChaoEstimator(RichnessEstimatorInterface):
    """
    Bias-corrected Chao lower bound

        C = c + f1 (f1 - 1) / (2 (f2 + 1))

    with variance, for f1 > 0,

        f1 (f1 - 1) / (2 (f2 + 1))
        + f1 (2 f1 - 1)^2 / (4 (f2 + 1)^2)
        + f1^2 f2 (f1 - 1)^2 / (4 (f2 + 1)^4)

    and, when there are no singletons,

        sum_j f_j (exp(-j) - exp(-2 j)) - (sum_j j f_j exp(-j))^2 / n
    """

    def estimate(self, table: FrequencyCountTable) -> RichnessEstimate:
        c = table.observed_richness
        f1 = table.singletons
        f2 = table.doubletons
        c_hat = c + f1 * (f1 - 1) / (2.0 * (f2 + 1))
        variance = self._variance(table, f1, f2)
        se = math.sqrt(variance) if variance > 0 else 0.0
        if se <= 0:
            # Degenerate tables (e.g. a single abundant species) give no
            # spread; keep the invariant se > 0 and let the flag show it.
            se = max(abs(c_hat), 1.0) * 1e-9
        warnings = tight_se_warnings(c_hat, se)
        if warnings:
            logging.warning(
                f"Chao-type standard error of sample '{table.sample_id}' is suspiciously tight: {se}"
            )
        return RichnessEstimate(
            sample_id=table.sample_id,
            c_hat=float(c_hat),
            se=float(se),
            c_obs=c,
            method=EstimateMethod.CHAO_TYPE,
            warnings=warnings,
        )

    def _variance(self, table: FrequencyCountTable, f1: int, f2: int) -> float:
        if f1 > 0:
            d = f2 + 1.0
            return (
                f1 * (f1 - 1) / (2 * d)
                + f1 * (2 * f1 - 1) ** 2 / (4 * d ** 2)
                + f1 ** 2 * f2 * (f1 - 1) ** 2 / (4 * d ** 4)
            )
        n = table.sample_size
        spread = sum(f * (math.exp(-j) - math.exp(-2 * j)) for j, f in table.entries)
        drift = sum(j * f * math.exp(-j) for j, f in table.entries)
        return spread - drift ** 2 / n
