from .tables import FrequencyCountTable


def simpson_plugin(table: FrequencyCountTable) -> float:
    """
    Plug-in Simpson index ``sum_i (n_i / n) ** 2`` computed from the frequency
    counts as ``sum_j f_j * (j / n) ** 2``.

    Notes
    -----
    Use is discouraged. The plug-in value is not the minimum variance unbiased
    estimator of the population index, and the index confounds evenness with
    richness: a small value may come from many species or from very unequal
    proportions, and the value alone cannot tell the two apart. Model total
    richness instead.
    """
    n = table.sample_size
    return float(sum(f * (j / n) ** 2 for j, f in table.entries))
