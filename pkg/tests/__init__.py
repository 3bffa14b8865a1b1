import unittest

from .frequency_data_tests import (
    AbundanceVectorTests,
    FrequencyCountTableTests,
    FrequencyTableParsingTests,
    SimpsonPluginTests,
)
from .estimation_tests import (
    ChaoEstimatorTests,
    ExternalEstimatesTests,
    RichnessEstimateTests,
    RichnessEstimatorFactoryTests,
    ZeroTruncatedNegativeBinomialEstimatorTests,
)
from .design_tests import CovariateTableTests, DesignMatrixTests
from .likelihood_tests import LogLikelihoodTests
from .fit_tests import FitControlTests, FitTests
from .inference_tests import (
    BlupTests,
    GlobalTestTests,
    HomogeneityTestTests,
    IntervalPlotDataTests,
    MarginalTestTests,
)
from .distributions_tests import DistributionTests
from .simulation_tests import (
    NbConfigTests,
    NormalityStudyTests,
    QCalibrationStudyTests,
    SamplingTests,
    SimulationWorkersTests,
)
from .local_directory_tests import LocalDirectoryTests, StorageInterfaceCreationTests
from .tasks_tests import (
    RichnessEstimationTaskTests,
    RichnessRegressionTaskTests,
    RunManifestTests,
    SimulationStudyTaskTests,
)
from .main_tests import CommandLineTests, MainModuleTests
