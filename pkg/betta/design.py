import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from slugify import slugify

from .errors import ModelError, RankDeficientDesignError

INTERCEPT = "intercept"
SAMPLE_ID_COLUMN = "sample_id"


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """
    Covariate matrix with one row per sample and a leading intercept column
    """

    values: np.ndarray
    column_names: Tuple[str, ...]
    sample_ids: Tuple[str, ...]
    reference_levels: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, ndmin=2)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))
        m, columns = values.shape
        if len(self.column_names) != columns:
            raise ModelError(
                f"{len(self.column_names)} column names for {columns} design columns"
            )
        if len(self.sample_ids) != m:
            raise ModelError(f"{len(self.sample_ids)} sample ids for {m} design rows")
        if len(set(self.sample_ids)) != m:
            raise ModelError("sample ids of the design are not unique")
        if not np.all(np.isfinite(values)):
            raise ModelError("design matrix has missing or infinite values")
        if not np.all(values[:, 0] == 1.0):
            raise ModelError("first design column must be the intercept (all ones)")
        rank = np.linalg.matrix_rank(values)
        if rank < columns:
            raise RankDeficientDesignError(
                f"design matrix has rank {rank} but {columns} columns: {list(self.column_names)}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def columns(self) -> int:
        return self.values.shape[1]

    @property
    def p(self) -> int:
        """
        Number of non-intercept covariates
        """
        return self.columns - 1

    def without_intercept(self) -> np.ndarray:
        return self.values[:, 1:]

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise ModelError(f"no design column named '{name}'")

    def select_samples(self, sample_ids: Sequence[str]) -> "DesignMatrix":
        rows = [self.sample_ids.index(s) for s in sample_ids]
        return DesignMatrix(
            self.values[rows], self.column_names, tuple(sample_ids), dict(self.reference_levels)
        )

    @classmethod
    def from_covariates(
        cls, frame: pd.DataFrame, sample_id_column: str = SAMPLE_ID_COLUMN
    ) -> "DesignMatrix":
        """
        Build the design from a covariate table. Numeric columns are used as
        given; non-numeric columns are treatment coded with the
        lexicographically first level as the reference.

        Example
        -------
        >>> frame = pd.DataFrame({
            "sample_id": ["a", "b", "c"],
            "treatment": ["pre", "during", "post"],
        })
        >>> design = DesignMatrix.from_covariates(frame)
        >>> design.column_names
        ('intercept', 'treatment_post', 'treatment_pre')
        >>> design.reference_levels
        {'treatment': 'during'}
        """
        if sample_id_column not in frame.columns:
            raise ModelError(f"covariate table has no '{sample_id_column}' column")
        sample_ids = [str(s).strip() for s in frame[sample_id_column]]
        names: List[str] = [INTERCEPT]
        columns: List[np.ndarray] = [np.ones(len(frame))]
        reference_levels = {}
        for covariate in frame.columns:
            if covariate == sample_id_column:
                continue
            series = frame[covariate]
            if series.isna().any():
                raise ModelError(f"covariate '{covariate}' has missing values")
            if pd.api.types.is_numeric_dtype(series) and not pd.api.types.is_bool_dtype(series):
                names.append(_unique_name(str(covariate), names))
                columns.append(series.to_numpy(dtype=float))
                continue
            levels = sorted({str(level) for level in series})
            reference_levels[str(covariate)] = levels[0]
            if len(levels) == 1:
                logging.warning(
                    f"Covariate '{covariate}' has a single level '{levels[0]}' and is absorbed by the intercept"
                )
            as_text = series.astype(str).to_numpy()
            for level in levels[1:]:
                name = f"{covariate}_{slugify(level, separator='_') or 'level'}"
                names.append(_unique_name(name, names))
                columns.append((as_text == level).astype(float))
        return cls(np.column_stack(columns), tuple(names), tuple(sample_ids), reference_levels)


def intercept_only(sample_ids: Sequence[str]) -> DesignMatrix:
    return DesignMatrix(np.ones((len(sample_ids), 1)), (INTERCEPT,), tuple(sample_ids))


def _unique_name(name: str, existing: List[str]) -> str:
    candidate = name
    suffix = 2
    while candidate in existing:
        candidate = f"{name}_{suffix}"
        suffix += 1
    return candidate
