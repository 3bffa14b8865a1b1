import os
from unittest import TestCase
from unittest.mock import MagicMock, patch

import numpy as np

from simulation import (
    InvalidStudyConfig,
    NbConfig,
    SimulationError,
    get_simulation_workers,
    run_normality_study,
    run_q_calibration,
    sample_truncated_nb,
    unit_generator,
)


class NbConfigTests(TestCase):
    def test_defaults(self):
        cfg = NbConfig()
        self.assertEqual((cfg.size, cfg.prob, cfg.n_species, cfg.seed), (500.0, 0.99, 5000, 0))
        self.assertAlmostEqual(cfg.zero_probability, 0.99 ** 500, places=15)
        self.assertAlmostEqual(cfg.zero_probability, 6.57e-3, delta=1e-5)
        self.assertAlmostEqual(cfg.mean, 500 * 0.01 / 0.99, places=12)
        self.assertAlmostEqual(cfg.bypass_se, 5.75, delta=0.01)

    def test_invalid_values(self):
        for kwargs in [{"size": 0}, {"prob": 1.0}, {"prob": 0.0}, {"n_species": 0}, {"seed": -1}]:
            with self.subTest(**kwargs):
                with self.assertRaises(InvalidStudyConfig):
                    NbConfig(**kwargs)

    def test_invalid_config_is_a_value_error(self):
        self.assertTrue(issubclass(InvalidStudyConfig, ValueError))


class SamplingTests(TestCase):
    def test_mean_abundance(self):
        cfg = NbConfig()
        for unit in range(10):
            table = sample_truncated_nb(cfg, unit_generator(1, unit))
            mean = table.sample_size / cfg.n_species
            self.assertLess(abs(mean - cfg.mean) / cfg.mean, 0.05)

    def test_unobserved_species_within_binomial_band(self):
        cfg = NbConfig()
        for unit in range(10):
            table = sample_truncated_nb(cfg, unit_generator(2, unit))
            unseen = cfg.n_species - table.observed_richness
            self.assertGreaterEqual(unseen, 16)
            self.assertLessEqual(unseen, 50)

    def test_no_truncation_limit(self):
        cfg = NbConfig(prob=0.9, seed=4)
        self.assertLess(cfg.zero_probability, 1e-12)
        table = sample_truncated_nb(cfg)
        self.assertEqual(table.observed_richness, cfg.n_species)

    def test_truncated_fraction_converges(self):
        cfg = NbConfig(n_species=100000, seed=8)
        table = sample_truncated_nb(cfg)
        fraction = 1 - table.observed_richness / cfg.n_species
        self.assertLess(abs(fraction - cfg.zero_probability) / cfg.zero_probability, 0.1)

    def test_all_zero_draws_is_an_error(self):
        rng = MagicMock()
        rng.negative_binomial.return_value = np.zeros(5000, dtype=int)
        with self.assertRaises(SimulationError):
            sample_truncated_nb(NbConfig(), rng)

    def test_unit_streams_are_reproducible_and_distinct(self):
        first = unit_generator(7, 3).integers(0, 2 ** 32, size=4)
        again = unit_generator(7, 3).integers(0, 2 ** 32, size=4)
        other = unit_generator(7, 4).integers(0, 2 ** 32, size=4)
        np.testing.assert_array_equal(first, again)
        self.assertFalse(np.array_equal(first, other))


class NormalityStudyTests(TestCase):
    def test_seeded_study_is_deterministic(self):
        cfg = NbConfig(seed=7)
        first = run_normality_study(cfg, 100)
        second = run_normality_study(cfg, 100)
        self.assertEqual(first.per_replicate, second.per_replicate)
        self.assertEqual(first.as_dict(), second.as_dict())
        self.assertEqual(first.qq, second.qq)

    def test_process_pool_gives_the_same_report(self):
        cfg = NbConfig(seed=7)
        serial = run_normality_study(cfg, 100, workers=1)
        parallel = run_normality_study(cfg, 100, workers=2)
        self.assertEqual(serial.per_replicate, parallel.per_replicate)

    def test_rescaled_estimates_are_standard_normal(self):
        report = run_normality_study(NbConfig(seed=1), 1000)
        self.assertLess(abs(report.summary["mean"]), 0.1)
        self.assertGreaterEqual(report.summary["sd"], 0.85)
        self.assertLessEqual(report.summary["sd"], 1.20)
        self.assertLess(report.summary["ks_distance"], 0.05)

    def test_qq_data_is_monotone(self):
        report = run_normality_study(NbConfig(seed=5), 100)
        self.assertEqual(len(report.qq), len(report.per_replicate))
        theoretical = [t for t, _ in report.qq]
        observed = [o for _, o in report.qq]
        self.assertEqual(theoretical, sorted(theoretical))
        self.assertEqual(observed, sorted(observed))
        self.assertEqual(report.requested, len(report.per_replicate) + report.failures)

    def test_too_few_replicates(self):
        with self.assertRaises(InvalidStudyConfig):
            run_normality_study(NbConfig(), 10)


class QCalibrationStudyTests(TestCase):
    def test_bypass_rejection_rate(self):
        report = run_q_calibration(NbConfig(seed=11), 2000, 20, bypass=True)
        self.assertEqual(report.failures, 0)
        self.assertEqual(report.summary["df"], 19)
        self.assertGreaterEqual(report.summary["rejection_rate"], 0.035)
        self.assertLessEqual(report.summary["rejection_rate"], 0.065)

    def test_bypass_statistics_follow_the_chi_square(self):
        report = run_q_calibration(NbConfig(seed=12), 10000, 20, bypass=True)
        self.assertLess(report.summary["ks_distance"], 0.02)

    def test_bypass_is_deterministic(self):
        first = run_q_calibration(NbConfig(seed=3), 50, 5, bypass=True)
        second = run_q_calibration(NbConfig(seed=3), 50, 5, bypass=True)
        self.assertEqual(first.per_replicate, second.per_replicate)

    def test_invalid_group_settings(self):
        with self.assertRaises(InvalidStudyConfig):
            run_q_calibration(NbConfig(), 50, 1, bypass=True)
        with self.assertRaises(InvalidStudyConfig):
            run_q_calibration(NbConfig(), 10, 20, bypass=True)

    def test_unknown_estimator_is_an_invalid_config(self):
        with self.assertRaises(InvalidStudyConfig):
            run_q_calibration(NbConfig(), 50, 5, estimator="breakaway")
        with self.assertRaises(InvalidStudyConfig):
            run_normality_study(NbConfig(), 100, estimator="external")

    def test_estimated_rejection_rate(self):
        report = run_q_calibration(NbConfig(seed=13), 200, 20, workers=get_simulation_workers())
        self.assertGreaterEqual(report.summary["rejection_rate"], 0.03)
        self.assertLessEqual(report.summary["rejection_rate"], 0.13)

    def test_estimated_rejection_rate_exceeds_the_exact_null(self):
        runs = 5
        inflated = 0
        for seed in range(100, 100 + runs):
            cfg = NbConfig(seed=seed)
            estimated = run_q_calibration(cfg, 200, 20, workers=get_simulation_workers())
            exact = run_q_calibration(cfg, 200, 20, bypass=True)
            inflated += estimated.summary["rejection_rate"] > exact.summary["rejection_rate"]
        self.assertGreaterEqual(inflated, 0.8 * runs)


class SimulationWorkersTests(TestCase):
    def test_default(self):
        with patch.dict("os.environ", {}, clear=False):
            os.environ.pop("SIMULATION_WORKERS", None)
            self.assertEqual(get_simulation_workers(), 1)

    @patch.dict("os.environ", {"SIMULATION_WORKERS": "4"})
    def test_from_environment(self):
        self.assertEqual(get_simulation_workers(), 4)
