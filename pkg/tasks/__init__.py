from .interfaces import StorageInterface
from .manifest import (
    Command,
    MANIFEST_FILE,
    RunManifest,
    create_run_manifest,
    write_run_manifest,
)
from .richness_estimation import (
    ABUNDANCE_FORMAT,
    ERRORS_FILE,
    ESTIMATES_FILE,
    FREQUENCY_FORMAT,
    EstimationRun,
    EstimationTaskError,
    InputFailure,
    estimate_richness_from_files,
)
from .richness_regression import (
    BLUP_FILE,
    INTERVALS_FILE,
    REPORT_FILE,
    build_report,
    fit_richness_model,
    load_design,
)
from .simulation_study import (
    QQ_FILE,
    REPLICATES_FILE,
    SUMMARY_FILE,
    load_study_config,
    run_simulation_study,
)
