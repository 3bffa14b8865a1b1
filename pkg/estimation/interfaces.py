import abc

from frequency_data import FrequencyCountTable

from .estimate import RichnessEstimate


class RichnessEstimatorInterface(abc.ABC):
    """
    Interface to abstract the estimators turning a frequency count table into
    a total richness estimate with its standard error
    """

    @abc.abstractmethod
    def estimate(self, table: FrequencyCountTable) -> RichnessEstimate:
        """
        Estimate the total richness of the sample described by the table
        """
