from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from betta import DesignMatrix, INTERCEPT, intercept_only
from estimation import EstimateMethod, RichnessEstimate

DATA_DIR = Path(__file__).parent / "data"


def make_estimates(
    c_hat: Sequence[float], se: Sequence[float], sample_ids: Optional[Sequence[str]] = None
):
    sample_ids = sample_ids or [f"s{i}" for i in range(len(c_hat))]
    return [
        RichnessEstimate(sample_id, float(c), float(s), None, EstimateMethod.EXTERNAL)
        for sample_id, c, s in zip(sample_ids, c_hat, se)
    ]


def make_design(covariates: np.ndarray, sample_ids: Optional[Sequence[str]] = None) -> DesignMatrix:
    covariates = np.asarray(covariates, dtype=float)
    if covariates.ndim == 1:
        covariates = covariates[:, None]
    m, p = covariates.shape
    sample_ids = sample_ids or [f"s{i}" for i in range(m)]
    return DesignMatrix(
        np.column_stack([np.ones(m), covariates]),
        (INTERCEPT,) + tuple(f"x{k}" for k in range(1, p + 1)),
        tuple(sample_ids),
    )


def random_instance(rng: np.random.Generator, m: int, p: int):
    """
    Small regression problem with heterogeneity for comparing fits
    """
    covariates = rng.normal(size=(m, p))
    beta = rng.normal(1000.0, 100.0, size=p + 1)
    se = rng.uniform(5.0, 30.0, size=m)
    sigma_u = rng.choice([0.0, 5.0, 20.0, 60.0])
    X = np.column_stack([np.ones(m), covariates])
    c_hat = X @ beta + rng.normal(0.0, sigma_u, size=m) + rng.normal(0.0, se)
    design = make_design(covariates) if p else intercept_only([f"s{i}" for i in range(m)])
    return make_estimates(c_hat, se), design
