import dataclasses
import functools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from betta import FitControl, ModelError, chi2_quantile, fit, intercept_only, normal_quantile, q_test
from estimation import EstimateMethod, EstimationError, RichnessEstimate, create_richness_estimator
from frequency_data import FrequencyTableError

from .sampling import InvalidStudyConfig, NbConfig, SimulationError, sample_truncated_nb, unit_generator

NORMALITY = "normality"
Q_CALIBRATION = "q-calibration"
NOMINAL_LEVEL = 0.05
MIN_REPLICATES = 100
MIN_GROUPS = 50
MIN_GROUP_SIZE = 2


def get_simulation_workers() -> int:
    return int(os.environ.get("SIMULATION_WORKERS", 1))


def check_study_estimator(estimator: str) -> None:
    try:
        create_richness_estimator(estimator)
    except ValueError as e:
        raise InvalidStudyConfig(str(e)) from e


@dataclass(frozen=True)
class StudyReport:
    study: str
    per_replicate: Tuple[float, ...]
    failures: int
    requested: int
    summary: Dict[str, float]
    qq: Tuple[Tuple[float, float], ...]
    config: Dict[str, Any]
    seed: int

    def as_dict(self) -> Dict[str, Any]:
        return {
            "study": self.study,
            "seed": self.seed,
            "config": dict(self.config),
            "requested": self.requested,
            "recorded": len(self.per_replicate),
            "failures": self.failures,
            "summary": dict(self.summary),
        }


def run_normality_study(
    cfg: NbConfig,
    replicates: int,
    estimator: str = "ztnb",
    workers: Optional[int] = None,
) -> StudyReport:
    """
    Draw ``replicates`` truncated NB samples, estimate the richness of each
    and record ``(C_hat - C) / se``, to be compared with a standard normal
    """
    if replicates < MIN_REPLICATES:
        raise InvalidStudyConfig(f"replicates must be at least {MIN_REPLICATES}, got {replicates}")
    check_study_estimator(estimator)
    logging.info(f"Starting normality study: {replicates} replicates, estimator {estimator}")
    unit = functools.partial(_normality_unit, cfg, estimator)
    values, failures = _collect(_run_units(unit, range(replicates), workers))
    critical_value = normal_quantile(1 - NOMINAL_LEVEL / 2)
    summary = _summary(values, stats.norm.cdf)
    summary["rejection_rate"] = float(np.mean(np.abs(values) > critical_value))
    summary["critical_value"] = critical_value
    logging.info(
        f"Normality study done: mean={summary['mean']:.6g} sd={summary['sd']:.6g} failures={failures}"
    )
    return StudyReport(
        study=NORMALITY,
        per_replicate=tuple(values.tolist()),
        failures=failures,
        requested=replicates,
        summary=summary,
        qq=_qq(values, normal_quantile),
        config={**dataclasses.asdict(cfg), "replicates": replicates, "estimator": estimator},
        seed=cfg.seed,
    )


def run_q_calibration(
    cfg: NbConfig,
    groups: int,
    group_size: int,
    estimator: str = "ztnb",
    bypass: bool = False,
    workers: Optional[int] = None,
) -> StudyReport:
    """
    For each group fit an intercept-only model to ``group_size`` independent
    richness estimates and record the homogeneity statistic Q, to be compared
    with a chi-square on ``group_size - 1`` degrees of freedom.

    In bypass mode no estimator runs: each estimate is drawn from
    ``Normal(C, s)`` with standard error ``s = NbConfig.bypass_se``, which makes
    the chi-square null exact.
    """
    if group_size < MIN_GROUP_SIZE:
        raise InvalidStudyConfig(f"group_size must be at least {MIN_GROUP_SIZE}, got {group_size}")
    if groups < MIN_GROUPS:
        raise InvalidStudyConfig(f"groups must be at least {MIN_GROUPS}, got {groups}")
    if not bypass:
        check_study_estimator(estimator)
    logging.info(
        f"Starting Q calibration: {groups} groups of {group_size}, "
        f"{'bypass' if bypass else 'estimator ' + estimator}"
    )
    unit = functools.partial(_q_calibration_unit, cfg, estimator, group_size, bypass)
    values, failures = _collect(_run_units(unit, range(groups), workers))
    df = group_size - 1
    critical_value = chi2_quantile(1 - NOMINAL_LEVEL, df)
    summary = _summary(values, functools.partial(stats.chi2.cdf, df=df))
    summary["rejection_rate"] = float(np.mean(values > critical_value))
    summary["critical_value"] = critical_value
    summary["df"] = df
    logging.info(
        f"Q calibration done: rejection rate={summary['rejection_rate']:.6g} failures={failures}"
    )
    return StudyReport(
        study=Q_CALIBRATION,
        per_replicate=tuple(values.tolist()),
        failures=failures,
        requested=groups,
        summary=summary,
        qq=_qq(values, lambda level: chi2_quantile(level, df)),
        config={
            **dataclasses.asdict(cfg),
            "groups": groups,
            "group_size": group_size,
            "estimator": estimator,
            "bypass": bypass,
        },
        seed=cfg.seed,
    )


def _normality_unit(cfg: NbConfig, estimator: str, unit: int) -> Optional[float]:
    rng = unit_generator(cfg.seed, unit)
    try:
        table = sample_truncated_nb(cfg, rng, sample_id=f"replicate-{unit}")
        estimate = create_richness_estimator(estimator).estimate(table)
    except (EstimationError, FrequencyTableError, SimulationError) as e:
        logging.debug(f"Replicate {unit} failed: {e}")
        return None
    return (estimate.c_hat - cfg.n_species) / estimate.se


def _q_calibration_unit(
    cfg: NbConfig, estimator: str, group_size: int, bypass: bool, unit: int
) -> Optional[float]:
    rng = unit_generator(cfg.seed, unit)
    sample_ids = [f"group-{unit}-{k}" for k in range(group_size)]
    try:
        if bypass:
            estimates = _bypass_estimates(cfg, rng, sample_ids)
        else:
            richness_estimator = create_richness_estimator(estimator)
            estimates = [
                richness_estimator.estimate(sample_truncated_nb(cfg, rng, sample_id))
                for sample_id in sample_ids
            ]
        model = fit(estimates, intercept_only(sample_ids), FitControl())
        return q_test(model).statistic
    except (EstimationError, FrequencyTableError, SimulationError, ModelError) as e:
        logging.debug(f"Group {unit} failed: {e}")
        return None


def _bypass_estimates(
    cfg: NbConfig, rng: np.random.Generator, sample_ids: Sequence[str]
) -> List[RichnessEstimate]:
    se = cfg.bypass_se
    draws = rng.normal(cfg.n_species, se, size=len(sample_ids))
    return [
        RichnessEstimate(sample_id, float(c_hat), se, None, EstimateMethod.EXTERNAL)
        for sample_id, c_hat in zip(sample_ids, draws)
    ]


def _run_units(
    unit: Callable[[int], Optional[float]], units: range, workers: Optional[int]
) -> List[Optional[float]]:
    workers = workers if workers is not None else get_simulation_workers()
    if workers <= 1:
        return [unit(index) for index in units]
    chunksize = max(1, len(units) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(unit, units, chunksize=chunksize))


def _collect(results: List[Optional[float]]) -> Tuple[np.ndarray, int]:
    values = np.array([value for value in results if value is not None], dtype=float)
    failures = len(results) - len(values)
    if failures:
        logging.warning(f"{failures} of {len(results)} study units failed and were skipped")
    if len(values) < 2:
        raise SimulationError(f"only {len(values)} of {len(results)} study units succeeded")
    return values, failures


def _summary(values: np.ndarray, cdf: Callable) -> Dict[str, float]:
    return {
        "mean": float(np.mean(values)),
        "sd": float(np.std(values, ddof=1)),
        "ks_distance": float(stats.kstest(values, cdf).statistic),
    }


def _qq(values: np.ndarray, quantile: Callable[[float], float]) -> Tuple[Tuple[float, float], ...]:
    ordered = np.sort(values)
    n = len(ordered)
    return tuple(
        (quantile((i - 0.5) / n), float(value)) for i, value in enumerate(ordered, start=1)
    )
