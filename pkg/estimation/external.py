import io
import logging
import math
from typing import List, Optional, TextIO, Union

import pandas as pd

from .estimate import EstimateMethod, ExternalEstimateError, RichnessEstimate, tight_se_warnings


EXTERNAL_COLUMNS = ["sample_id", "c_hat", "se", "c_obs"]


def load_external_estimates(text: Union[str, TextIO]) -> List[RichnessEstimate]:
    """
    Load richness estimates produced by other software from a CSV with the
    columns ``sample_id,c_hat,se[,c_obs]``. The header row is optional and
    extra columns are ignored when a header is present.

    Example
    -------
    >>> load_external_estimates("sample_id,c_hat,se\\nA,1000,50\\n")
    [RichnessEstimate(sample_id='A', c_hat=1000.0, se=50.0, ...)]
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    try:
        frame = pd.read_csv(
            stream, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ExternalEstimateError(f"could not read estimates: {e}") from e
    if frame.empty:
        raise ExternalEstimateError("no estimates found")
    first_row = [value.strip() for value in frame.iloc[0]]
    has_header = first_row[0] == "sample_id"
    if has_header:
        frame = frame.iloc[1:].rename(columns=dict(enumerate(first_row)))
    else:
        if frame.shape[1] > len(EXTERNAL_COLUMNS):
            raise ExternalEstimateError(
                f"expected at most {len(EXTERNAL_COLUMNS)} columns without a header"
            )
        frame = frame.rename(columns=dict(enumerate(EXTERNAL_COLUMNS)))
    for column in ["sample_id", "c_hat", "se"]:
        if column not in frame.columns:
            raise ExternalEstimateError(f"missing column '{column}'")

    estimates = []
    seen = set()
    first_line = 2 if has_header else 1
    for line_number, row in enumerate(frame.to_dict("records"), start=first_line):
        estimate = _build_estimate(row, line_number)
        if estimate.sample_id in seen:
            raise ExternalEstimateError(
                f"duplicate sample id '{estimate.sample_id}'", line_number
            )
        seen.add(estimate.sample_id)
        estimates.append(estimate)
    logging.debug(f"Loaded {len(estimates)} external estimates")
    return estimates


def _build_estimate(row: dict, line_number: int) -> RichnessEstimate:
    sample_id = str(row["sample_id"]).strip()
    if not sample_id:
        raise ExternalEstimateError("empty sample id", line_number)
    c_hat = _parse_number(row["c_hat"], "c_hat", line_number)
    c_obs = _parse_observed(row.get("c_obs"), line_number)
    if c_obs is not None and c_hat < c_obs:
        raise ExternalEstimateError(
            f"c_hat {c_hat} is below the observed richness {c_obs} for '{sample_id}'",
            line_number,
        )
    se = _parse_number(row["se"], "se", line_number)
    if se <= 0:
        raise ExternalEstimateError(
            f"se must be positive for '{sample_id}': the model requires a positive "
            f"sampling variance for every richness estimate, got {se}",
            line_number,
        )
    return RichnessEstimate(
        sample_id=sample_id,
        c_hat=c_hat,
        se=se,
        c_obs=c_obs,
        method=EstimateMethod.EXTERNAL,
        warnings=tight_se_warnings(c_hat, se),
    )


def _parse_number(value: str, name: str, line_number: int) -> float:
    try:
        number = float(str(value).strip())
    except ValueError:
        raise ExternalEstimateError(f"{name} is not a number: '{value}'", line_number)
    if not math.isfinite(number):
        raise ExternalEstimateError(f"{name} is not finite: '{value}'", line_number)
    return number


def _parse_observed(value: Optional[str], line_number: int) -> Optional[int]:
    if value is None or str(value).strip() in ("", "-", "NA"):
        return None
    number = _parse_number(value, "c_obs", line_number)
    if not number.is_integer() or number < 0:
        raise ExternalEstimateError(
            f"c_obs must be a non-negative integer: '{value}'", line_number
        )
    return int(number)
