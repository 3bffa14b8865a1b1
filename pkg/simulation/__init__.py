from .sampling import (
    InvalidStudyConfig,
    NbConfig,
    SimulationError,
    sample_truncated_nb,
    unit_generator,
)
from .studies import (
    NORMALITY,
    Q_CALIBRATION,
    StudyReport,
    get_simulation_workers,
    run_normality_study,
    run_q_calibration,
)

__all__ = [
    "InvalidStudyConfig",
    "NORMALITY",
    "NbConfig",
    "Q_CALIBRATION",
    "SimulationError",
    "StudyReport",
    "get_simulation_workers",
    "run_normality_study",
    "run_q_calibration",
    "sample_truncated_nb",
    "unit_generator",
]
