import io
import json
import logging
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pandas as pd

from betta import (
    VARIANCE_CAVEAT,
    BettaFit,
    DegreesOfFreedomError,
    DesignMatrix,
    FitControl,
    NoCovariatesError,
    SampleMismatchError,
    TestResult,
    blup,
    fit,
    global_test,
    intercept_only,
    interval_plot_data,
    marginal_test,
    q_test,
)
from estimation import RichnessEstimate, load_external_estimates

from .interfaces import StorageInterface
from .utils import format_significant

REPORT_SCHEMA_VERSION = 1
REPORT_FILE = "fit_report.json"
BLUP_FILE = "blup.csv"
INTERVALS_FILE = "intervals.csv"
SAMPLE_ID_COLUMN = "sample_id"


def fit_richness_model(
    estimates_text: str,
    storage: StorageInterface,
    covariates_text: Optional[str] = None,
    exclude: Sequence[str] = (),
    control: Optional[FitControl] = None,
) -> Dict[str, Any]:
    """
    Fit richness against the covariates, run the tests and write the fit
    report, the shrinkage table and the interval plot data. Without a
    covariates table the model has only the intercept.

    Samples named in ``exclude`` are dropped from both tables before fitting,
    to refit after an influential sample has been spotted.
    """
    estimates = load_external_estimates(estimates_text)
    estimates = exclude_samples(estimates, exclude)
    if covariates_text is None:
        design = intercept_only([e.sample_id for e in estimates])
    else:
        design = load_design(covariates_text, exclude)
    logging.info(
        f"Fitting {design.rows} samples against {design.p} covariates "
        f"({len(exclude)} excluded)"
    )
    model = fit(estimates, design, control)
    report = build_report(model, exclude)

    ordered = {e.sample_id: e for e in estimates}
    intervals = interval_plot_data([ordered[sample_id] for sample_id in model.sample_ids])
    storage.upload_content(REPORT_FILE, json.dumps(report, indent=2) + "\n")
    storage.upload_content(BLUP_FILE, blup_frame(model).to_csv(index=False))
    storage.upload_content(INTERVALS_FILE, intervals_frame(intervals).to_csv(index=False))
    logging.info(
        f"Fit done: sigma2_u={model.sigma2_u_hat:.6g}, converged={model.converged}, "
        f"method={model.method}"
    )
    return report


def exclude_samples(
    estimates: Sequence[RichnessEstimate], exclude: Iterable[str]
) -> List[RichnessEstimate]:
    exclude = set(exclude)
    unknown = exclude - {e.sample_id for e in estimates}
    if unknown:
        raise SampleMismatchError(f"cannot exclude unknown samples: {sorted(unknown)}")
    for sample_id in sorted(exclude):
        logging.info(f"Excluding sample {sample_id}")
    return [e for e in estimates if e.sample_id not in exclude]


def load_design(covariates_text: str, exclude: Iterable[str] = ()) -> DesignMatrix:
    """
    Read a covariates CSV with a ``sample_id`` column into a design matrix,
    leaving out the excluded samples
    """
    frame = pd.read_csv(io.StringIO(covariates_text), dtype={SAMPLE_ID_COLUMN: str})
    frame.columns = [str(column).strip() for column in frame.columns]
    if SAMPLE_ID_COLUMN in frame.columns:
        frame[SAMPLE_ID_COLUMN] = frame[SAMPLE_ID_COLUMN].str.strip()
        frame = frame[~frame[SAMPLE_ID_COLUMN].isin(set(exclude))].reset_index(drop=True)
    return DesignMatrix.from_covariates(frame, SAMPLE_ID_COLUMN)


def build_report(model: BettaFit, exclude: Sequence[str] = ()) -> Dict[str, Any]:
    """
    JSON-ready fit report. Numbers keep full precision.
    """
    notices = []
    try:
        homogeneity = _test_dict(q_test(model))
    except DegreesOfFreedomError as e:
        homogeneity = None
        notices.append(f"homogeneity test omitted: {e}")
    try:
        overall = _test_dict(global_test(model))
    except NoCovariatesError as e:
        overall = None
        notices.append(f"global test omitted: {e}")
    if not model.converged:
        notices.append("REML iterations did not converge; estimates are from the last iterate")

    coefficients = []
    for index, name in enumerate(model.column_names):
        test = marginal_test(model, index)
        coefficients.append(
            {
                "name": name,
                "estimate": float(model.beta_hat[index]),
                "se": float(model.se_beta[index]),
                "z": test.statistic,
                "p_value": test.p_value,
            }
        )
    shrinkage = blup(model)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "samples": list(model.sample_ids),
        "excluded": sorted(exclude),
        "reference_levels": dict(model.design.reference_levels),
        "coefficients": coefficients,
        "sigma2_u": model.sigma2_u_hat,
        "homogeneity_test": homogeneity,
        "global_test": overall,
        "convergence": {
            "converged": model.converged,
            "iterations": model.iterations,
            "method": model.method,
            "reml_loglik": model.reml_loglik,
        },
        "blup": {
            "c_star": [float(value) for value in shrinkage.c_star],
            "se_c_star": [float(value) for value in shrinkage.se_c_star],
            "shrinkage": [float(value) for value in shrinkage.shrinkage],
            "caveat": VARIANCE_CAVEAT,
        },
        "notices": notices,
    }


def blup_frame(model: BettaFit) -> pd.DataFrame:
    shrinkage = blup(model)
    return pd.DataFrame(
        {
            "sample_id": list(model.sample_ids),
            "c_hat": [format_significant(v) for v in model.c_hat],
            "se": [format_significant(v) for v in model.se],
            "fitted": [format_significant(v) for v in shrinkage.fitted],
            "shrinkage": [format_significant(v) for v in shrinkage.shrinkage],
            "c_star": [format_significant(v) for v in shrinkage.c_star],
            "se_c_star": [format_significant(v) for v in shrinkage.se_c_star],
        }
    )


def intervals_frame(intervals) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "sample_id": [row.sample_id for row in intervals],
            "lower": [format_significant(row.lower) for row in intervals],
            "center": [format_significant(row.center) for row in intervals],
            "upper": [format_significant(row.upper) for row in intervals],
            "tight": [str(row.tight).lower() for row in intervals],
        },
        columns=["sample_id", "lower", "center", "upper", "tight"],
    )


def _test_dict(result: TestResult) -> Dict[str, Any]:
    return {
        "statistic": result.statistic,
        "df": result.df,
        "p_value": result.p_value,
    }
