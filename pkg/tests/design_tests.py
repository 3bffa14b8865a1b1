import logging
from unittest import TestCase

import numpy as np
import pandas as pd

from betta import DesignMatrix, INTERCEPT, ModelError, RankDeficientDesignError, intercept_only


class DesignMatrixTests(TestCase):
    def test_intercept_only(self):
        design = intercept_only(["a", "b", "c"])
        self.assertEqual(design.column_names, (INTERCEPT,))
        self.assertEqual(design.p, 0)
        self.assertEqual(design.rows, 3)
        np.testing.assert_array_equal(design.values, np.ones((3, 1)))

    def test_first_column_must_be_the_intercept(self):
        with self.assertRaises(ModelError):
            DesignMatrix(np.array([[1.0, 2.0], [0.0, 3.0]]), ("a", "b"), ("s0", "s1"))

    def test_sample_ids_must_be_unique(self):
        with self.assertRaises(ModelError):
            intercept_only(["a", "a"])

    def test_values_are_read_only(self):
        design = intercept_only(["a", "b"])
        with self.assertRaises(ValueError):
            design.values[0, 0] = 2.0

    def test_more_columns_than_samples_is_rank_deficient(self):
        with self.assertRaises(RankDeficientDesignError):
            DesignMatrix(
                np.array([[1.0, 0.0, 2.0], [1.0, 1.0, 5.0]]), (INTERCEPT, "x", "z"), ("s0", "s1")
            )

    def test_select_samples(self):
        frame = pd.DataFrame({"sample_id": ["a", "b", "c"], "dose": [1.0, 2.0, 3.0]})
        design = DesignMatrix.from_covariates(frame).select_samples(["c", "a"])
        np.testing.assert_array_equal(design.values[:, 1], [3.0, 1.0])
        self.assertEqual(design.sample_ids, ("c", "a"))


class CovariateTableTests(TestCase):
    def test_numeric_columns_are_used_as_given(self):
        frame = pd.DataFrame({"sample_id": ["a", "b", "c"], "dose": [0.5, 1.0, 4.0]})
        design = DesignMatrix.from_covariates(frame)
        self.assertEqual(design.column_names, (INTERCEPT, "dose"))
        np.testing.assert_array_equal(design.values[:, 1], [0.5, 1.0, 4.0])
        self.assertEqual(design.reference_levels, {})

    def test_categorical_columns_are_treatment_coded(self):
        frame = pd.DataFrame(
            {"sample_id": ["a", "b", "c", "d"], "treatment": ["pre", "during", "post", "pre"]}
        )
        design = DesignMatrix.from_covariates(frame)
        self.assertEqual(design.column_names, (INTERCEPT, "treatment_post", "treatment_pre"))
        self.assertEqual(design.reference_levels, {"treatment": "during"})
        np.testing.assert_array_equal(design.values[:, 1], [0.0, 0.0, 1.0, 0.0])
        np.testing.assert_array_equal(design.values[:, 2], [1.0, 0.0, 0.0, 1.0])

    def test_level_names_are_slugified(self):
        frame = pd.DataFrame(
            {"sample_id": ["a", "b", "c"], "site": ["Lago Azul", "Rio Claro", "Lago Azul"]}
        )
        design = DesignMatrix.from_covariates(frame)
        self.assertEqual(design.column_names, (INTERCEPT, "site_rio_claro"))

    def test_single_level_column_is_absorbed(self):
        frame = pd.DataFrame({"sample_id": ["a", "b"], "soil": ["clay", "clay"]})
        with self.assertLogs(level=logging.WARNING):
            design = DesignMatrix.from_covariates(frame)
        self.assertEqual(design.column_names, (INTERCEPT,))

    def test_missing_values_are_an_error(self):
        frame = pd.DataFrame({"sample_id": ["a", "b"], "dose": [1.0, None]})
        with self.assertRaises(ModelError):
            DesignMatrix.from_covariates(frame)

    def test_sample_id_column_is_required(self):
        with self.assertRaises(ModelError):
            DesignMatrix.from_covariates(pd.DataFrame({"dose": [1.0, 2.0]}))
