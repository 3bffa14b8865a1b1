class ModelError(Exception):
    """
    Raised when the richness regression cannot be fitted or tested
    """


class RankDeficientDesignError(ModelError):
    pass


class SampleMismatchError(ModelError):
    pass


class DegreesOfFreedomError(ModelError):
    pass


class NoCovariatesError(ModelError):
    pass
