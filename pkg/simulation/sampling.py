import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from frequency_data import FrequencyCountTable


class SimulationError(Exception):
    pass


class InvalidStudyConfig(SimulationError, ValueError):
    pass


@dataclass(frozen=True)
class NbConfig:
    """
    Negative binomial abundance model: each of ``n_species`` species is seen
    ``k`` times with ``P(k) = C(k + size - 1, k) prob^size (1 - prob)^k``, so
    the mean is ``size (1 - prob) / prob`` and the unseen fraction is
    ``prob^size``.
    """

    size: float = 500.0
    prob: float = 0.99
    n_species: int = 5000
    seed: int = 0

    def __post_init__(self):
        if not self.size > 0:
            raise InvalidStudyConfig(f"size must be positive, got {self.size}")
        if not 0 < self.prob < 1:
            raise InvalidStudyConfig(f"prob must be in (0, 1), got {self.prob}")
        if int(self.n_species) != self.n_species or self.n_species < 1:
            raise InvalidStudyConfig(f"n_species must be a positive integer, got {self.n_species}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise InvalidStudyConfig(f"seed must be a 64-bit non-negative integer, got {self.seed}")

    @property
    def zero_probability(self) -> float:
        return math.exp(self.size * math.log(self.prob))

    @property
    def mean(self) -> float:
        return self.size * (1 - self.prob) / self.prob

    @property
    def bypass_se(self) -> float:
        """
        Standard deviation of the completed count ``c / (1 - p0)`` when only the
        binomial thinning is random
        """
        p0 = self.zero_probability
        return math.sqrt(self.n_species * p0 / (1 - p0))


def unit_generator(seed: int, unit: int) -> np.random.Generator:
    """
    PCG64 stream of one work unit, derived from ``(seed, unit)`` only
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(unit,))))


def sample_truncated_nb(
    cfg: NbConfig,
    rng: Optional[np.random.Generator] = None,
    sample_id: Optional[str] = None,
) -> FrequencyCountTable:
    """
    Draw the abundances of all species, drop the unseen ones and tally the
    rest into a frequency count table
    """
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))
    draws = rng.negative_binomial(cfg.size, cfg.prob, size=int(cfg.n_species))
    observed = draws[draws > 0]
    if observed.size == 0:
        raise SimulationError(f"all {cfg.n_species} draws are zero")
    frequencies, counts = np.unique(observed, return_counts=True)
    return FrequencyCountTable(
        tuple(zip(frequencies.tolist(), counts.tolist())),
        sample_id if sample_id is not None else f"nb-{cfg.seed}",
    )
