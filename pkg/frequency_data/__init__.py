from .tables import (
    AbundanceVector,
    FrequencyCountTable,
    FrequencyTableError,
    expand_to_abundances,
    from_abundances,
    parse_abundance_vector,
    parse_frequency_table,
)
from .simpson import simpson_plugin

__all__ = [
    "AbundanceVector",
    "FrequencyCountTable",
    "FrequencyTableError",
    "expand_to_abundances",
    "from_abundances",
    "parse_abundance_vector",
    "parse_frequency_table",
    "simpson_plugin",
]
