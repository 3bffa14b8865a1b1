import json
import logging
from typing import Any, Dict, Optional

import pandas as pd

from simulation import (
    NORMALITY,
    Q_CALIBRATION,
    InvalidStudyConfig,
    NbConfig,
    StudyReport,
    run_normality_study,
    run_q_calibration,
)

from .interfaces import StorageInterface
from .utils import format_significant

SUMMARY_FILE = "study_summary.json"
REPLICATES_FILE = "replicates.csv"
QQ_FILE = "qq.csv"
STUDY_DEFAULTS = {
    "replicates": 1000,
    "groups": 500,
    "group_size": 20,
    "bypass": False,
}
CONFIG_KEYS = {"study", "size", "prob", "n_species", "seed", "estimator", "workers"} | set(
    STUDY_DEFAULTS
)


def load_study_config(text: str) -> Dict[str, Any]:
    """
    Read study settings from a JSON object. Unknown keys are rejected.

    Example
    -------
    >>> load_study_config('{"study": "normality", "replicates": 200, "seed": 7}')
        {'study': 'normality', 'replicates': 200, 'seed': 7}
    """
    try:
        config = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidStudyConfig(f"study configuration is not valid JSON: {e}") from e
    if not isinstance(config, dict):
        raise InvalidStudyConfig("study configuration must be a JSON object")
    unknown = set(config) - CONFIG_KEYS
    if unknown:
        raise InvalidStudyConfig(f"unknown study configuration keys: {sorted(unknown)}")
    return config


def run_simulation_study(
    settings: Dict[str, Any], storage: StorageInterface
) -> StudyReport:
    """
    Run the study described by ``settings`` (the keys of a study configuration
    file) and write its summary, per-replicate statistics and QQ data
    """
    settings = {**STUDY_DEFAULTS, **{k: v for k, v in settings.items() if v is not None}}
    study = settings.get("study")
    cfg = NbConfig(
        **{key: settings[key] for key in ("size", "prob", "n_species", "seed") if key in settings}
    )
    estimator = settings.get("estimator")
    workers = settings.get("workers")
    if study == NORMALITY:
        report = run_normality_study(
            cfg, int(settings["replicates"]), estimator or "ztnb", workers
        )
    elif study == Q_CALIBRATION:
        report = run_q_calibration(
            cfg,
            int(settings["groups"]),
            int(settings["group_size"]),
            estimator or "ztnb",
            bool(settings["bypass"]),
            workers,
        )
    else:
        raise InvalidStudyConfig(f'Study "{study}" is not available.')
    write_study_report(report, storage)
    return report


def write_study_report(report: StudyReport, storage: StorageInterface) -> None:
    storage.upload_content(SUMMARY_FILE, json.dumps(report.as_dict(), indent=2) + "\n")
    replicates = pd.DataFrame(
        {
            "replicate": range(1, len(report.per_replicate) + 1),
            "statistic": [format_significant(v) for v in report.per_replicate],
        }
    )
    storage.upload_content(REPLICATES_FILE, replicates.to_csv(index=False))
    qq = pd.DataFrame(
        {
            "theoretical": [format_significant(t) for t, _ in report.qq],
            "observed": [format_significant(o) for _, o in report.qq],
        },
        columns=["theoretical", "observed"],
    )
    storage.upload_content(QQ_FILE, qq.to_csv(index=False))
    logging.debug(f"Study report of {report.study} written")
