import io
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np


class FrequencyTableError(ValueError):
    """
    Raised when a frequency count table or an abundance vector is invalid
    """

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


@dataclass(frozen=True)
class FrequencyCountTable:
    """
    Frequency counts of one sample: ``entries`` holds ``(j, f_j)`` pairs where
    ``f_j`` species were observed exactly ``j`` times.
    """

    entries: Tuple[Tuple[int, int], ...]
    sample_id: str = ""

    def __post_init__(self):
        entries = tuple((int(j), int(f)) for j, f in self.entries)
        object.__setattr__(self, "entries", entries)
        previous = 0
        for j, f in entries:
            if j < 1:
                raise FrequencyTableError(f"frequency must be at least 1, got {j}")
            if j <= previous:
                raise FrequencyTableError(
                    f"frequencies must be strictly increasing, got {j} after {previous}"
                )
            if f < 0:
                raise FrequencyTableError(f"count for frequency {j} is negative: {f}")
            previous = j
        if not any(f > 0 for _, f in entries):
            raise FrequencyTableError(
                f"table for sample '{self.sample_id}' has no observed species"
            )

    @property
    def observed_richness(self) -> int:
        return sum(f for _, f in self.entries)

    @property
    def sample_size(self) -> int:
        return sum(j * f for j, f in self.entries)

    @property
    def singletons(self) -> int:
        return self.count(1)

    @property
    def doubletons(self) -> int:
        return self.count(2)

    def count(self, j: int) -> int:
        for frequency, f in self.entries:
            if frequency == j:
                return f
        return 0

    def frequencies(self) -> np.ndarray:
        return np.array([j for j, f in self.entries if f > 0], dtype=float)

    def counts(self) -> np.ndarray:
        return np.array([f for _, f in self.entries if f > 0], dtype=float)

    def distinct_frequencies(self) -> int:
        return sum(1 for _, f in self.entries if f > 0)


@dataclass(frozen=True)
class AbundanceVector:
    """
    Per-species abundances of one sample
    """

    counts: Tuple[int, ...]
    sample_id: str = ""

    def __post_init__(self):
        counts = tuple(int(n) for n in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) == 0:
            raise FrequencyTableError("abundance vector is empty")
        for position, n in enumerate(counts, start=1):
            if n < 1:
                raise FrequencyTableError(
                    f"abundance at position {position} is below 1: {n}"
                )


def from_abundances(
    vector: Union[AbundanceVector, Sequence[int]], sample_id: Optional[str] = None
) -> FrequencyCountTable:
    """
    Tally an abundance vector into a frequency count table
    """
    if not isinstance(vector, AbundanceVector):
        vector = AbundanceVector(tuple(vector), sample_id or "")
    tally = Counter(vector.counts)
    return FrequencyCountTable(
        tuple(sorted(tally.items())),
        sample_id if sample_id is not None else vector.sample_id,
    )


def expand_to_abundances(table: FrequencyCountTable) -> AbundanceVector:
    counts = [j for j, f in table.entries for _ in range(f)]
    return AbundanceVector(tuple(counts), table.sample_id)


def parse_frequency_table(
    text: Union[str, TextIO], sample_id: str
) -> FrequencyCountTable:
    """
    Parse a two column ``j<delim>f_j`` table. The delimiter is a comma or a tab,
    detected from the first non-empty line. A non-numeric first row is taken
    as a header. Rows with ``f_j = 0`` are dropped and rows are sorted by ``j``.
    """
    lines = _read_lines(text)
    delimiter = _detect_delimiter(lines)
    rows: List[Tuple[int, int]] = []
    seen = {}
    last_line = 0
    for line_number, line in lines:
        last_line = line_number
        fields = [field.strip() for field in line.split(delimiter)]
        if len(fields) != 2:
            raise FrequencyTableError(
                f"expected 2 columns, found {len(fields)}", line_number
            )
        if not rows and not seen and _is_header(fields):
            logging.debug(f"Skipping header of sample '{sample_id}': {line}")
            continue
        j = _parse_integer(fields[0], "frequency", line_number)
        f = _parse_integer(fields[1], "count", line_number)
        if j < 1:
            raise FrequencyTableError(f"frequency must be at least 1, got {j}", line_number)
        if f < 0:
            raise FrequencyTableError(f"count must be non-negative, got {f}", line_number)
        if j in seen:
            raise FrequencyTableError(
                f"duplicate frequency {j} (first seen on line {seen[j]})", line_number
            )
        seen[j] = line_number
        if f > 0:
            rows.append((j, f))
    if not rows:
        raise FrequencyTableError(
            f"no observed species in sample '{sample_id}'", last_line
        )
    rows.sort()
    return FrequencyCountTable(tuple(rows), sample_id)


def parse_abundance_vector(text: Union[str, TextIO], sample_id: str) -> AbundanceVector:
    """
    Parse one integer abundance per line
    """
    counts = []
    for line_number, line in _read_lines(text):
        n = _parse_integer(line, "abundance", line_number)
        if n < 1:
            raise FrequencyTableError(f"abundance must be at least 1, got {n}", line_number)
        counts.append(n)
    if not counts:
        raise FrequencyTableError(f"abundance file for sample '{sample_id}' is empty")
    return AbundanceVector(tuple(counts), sample_id)


def _read_lines(text: Union[str, TextIO]) -> List[Tuple[int, str]]:
    stream = io.StringIO(text) if isinstance(text, str) else text
    return [
        (line_number, line.strip())
        for line_number, line in enumerate(stream, start=1)
        if line.strip()
    ]


def _detect_delimiter(lines: Iterable[Tuple[int, str]]) -> str:
    for _, line in lines:
        return "\t" if "\t" in line else ","
    return ","


def _is_header(fields: List[str]) -> bool:
    return not any(_is_number(field) for field in fields)


def _is_number(value: str) -> bool:
    try:
        float(value)
    except ValueError:
        return False
    return True


def _parse_integer(value: str, name: str, line_number: int) -> int:
    try:
        return int(value)
    except ValueError:
        pass
    try:
        number = float(value)
    except ValueError:
        raise FrequencyTableError(f"{name} is not a number: '{value}'", line_number)
    if not np.isfinite(number) or not number.is_integer():
        raise FrequencyTableError(f"{name} is not an integer: '{value}'", line_number)
    return int(number)
