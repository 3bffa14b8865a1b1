import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import pandas as pd

from estimation import (
    EstimateMethod,
    EstimationError,
    RichnessEstimate,
    create_richness_estimator,
    load_external_estimates,
)
from frequency_data import (
    FrequencyTableError,
    from_abundances,
    parse_abundance_vector,
    parse_frequency_table,
)

from .interfaces import StorageInterface
from .utils import format_exact

ESTIMATES_FILE = "estimates.csv"
ERRORS_FILE = "errors.csv"
ESTIMATE_COLUMNS = ["sample_id", "c_obs", "c_hat", "se", "method", "warnings"]
ERROR_COLUMNS = ["file", "line", "message"]
FREQUENCY_FORMAT = "frequency"
ABUNDANCE_FORMAT = "abundance"


class EstimationTaskError(Exception):
    """
    No input file produced a richness estimate
    """


@dataclass(frozen=True)
class InputFailure:
    file: str
    line: Optional[int]
    message: str


@dataclass(frozen=True)
class EstimationRun:
    estimates: Tuple[RichnessEstimate, ...]
    failures: Tuple[InputFailure, ...]
    inputs: Tuple[Tuple[str, str], ...]


def estimate_richness_from_files(
    paths: Iterable[str],
    storage: StorageInterface,
    method: Optional[str] = None,
    input_format: str = FREQUENCY_FORMAT,
    keep_going: bool = False,
) -> EstimationRun:
    """
    Estimate the richness of every input file and write the estimates table,
    one row per sample, and the table of files that could not be used.

    Without ``keep_going`` the first failing file stops the run. With it the
    failure is recorded and the remaining files are processed; the run only
    fails when no file gives an estimate.
    """
    logging.info("Starting richness estimation from files")
    external = method is not None and method.lower() == EstimateMethod.EXTERNAL.value
    estimator = None if external else create_richness_estimator(method)

    estimates: List[RichnessEstimate] = []
    failures: List[InputFailure] = []
    inputs: List[Tuple[str, str]] = []
    seen = set()
    for path in paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
            inputs.append((str(path), text))
            if external:
                file_estimates = load_external_estimates(text)
            else:
                file_estimates = [estimate_file(path, text, estimator, input_format)]
            for estimate in file_estimates:
                if estimate.sample_id in seen:
                    raise EstimationError(f"sample id '{estimate.sample_id}' appears in more than one input")
                seen.add(estimate.sample_id)
        except (OSError, UnicodeDecodeError, FrequencyTableError, EstimationError) as e:
            if not keep_going:
                raise
            logging.warning(f"Could not estimate richness from {path}. Cause: {e}")
            logging.exception(e)
            failures.append(InputFailure(str(path), getattr(e, "line_number", None), str(e)))
        else:
            estimates.extend(file_estimates)

    if not estimates:
        raise EstimationTaskError(f"none of the {len(failures)} input files gave an estimate")
    write_estimates(estimates, storage)
    write_failures(failures, storage)
    logging.info(f"Estimated richness of {len(estimates)} samples, {len(failures)} files failed")
    return EstimationRun(tuple(estimates), tuple(failures), tuple(inputs))


def estimate_file(path: str, text: str, estimator, input_format: str) -> RichnessEstimate:
    """
    Parse one sample file, named after the file, and estimate its richness
    """
    sample_id = Path(path).stem
    logging.debug(f"Estimating richness of {sample_id} from {path}")
    if input_format == ABUNDANCE_FORMAT:
        table = from_abundances(parse_abundance_vector(text, sample_id))
    elif input_format == FREQUENCY_FORMAT:
        table = parse_frequency_table(text, sample_id)
    else:
        raise ValueError(f'Input format "{input_format}" is not supported.')
    return estimator.estimate(table)


def estimates_frame(estimates: Iterable[RichnessEstimate]) -> pd.DataFrame:
    rows = [
        {
            "sample_id": estimate.sample_id,
            "c_obs": "" if estimate.c_obs is None else str(estimate.c_obs),
            "c_hat": format_exact(estimate.c_hat),
            "se": format_exact(estimate.se),
            "method": EstimateMethod(estimate.method).value,
            "warnings": ";".join(estimate.warnings),
        }
        for estimate in estimates
    ]
    return pd.DataFrame(rows, columns=ESTIMATE_COLUMNS)


def write_estimates(estimates: Iterable[RichnessEstimate], storage: StorageInterface) -> None:
    storage.upload_content(ESTIMATES_FILE, estimates_frame(estimates).to_csv(index=False))


def write_failures(failures: Iterable[InputFailure], storage: StorageInterface) -> None:
    rows = [
        {"file": f.file, "line": "" if f.line is None else str(f.line), "message": f.message}
        for f in failures
    ]
    storage.upload_content(ERRORS_FILE, pd.DataFrame(rows, columns=ERROR_COLUMNS).to_csv(index=False))
