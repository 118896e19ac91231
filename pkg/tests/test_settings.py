import unittest
from fractions import Fraction

from config.settings import Settings, SolveConfig
from core.exceptions import ConfigError
from utils.environment import cpu_count, memory_usage_mb, worker_count


class TestSolveConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = SolveConfig.from_settings()
        self.assertEqual(cfg.prime, Settings.DEFAULT_PRIME)
        self.assertEqual(cfg.retry_prime, Settings.RETRY_PRIME)
        self.assertEqual(cfg.a_fmax, 2)
        self.assertEqual(cfg.mode, "auto")
        self.assertEqual(cfg.primes(), [4099, 7919])

    def test_none_overrides_are_ignored(self):
        self.assertEqual(SolveConfig.from_settings(prime=None, mode=None), SolveConfig.from_settings())

    def test_invalid_values(self):
        cases = [
            {"prime": 4},
            {"prime": 2},
            {"retry_prime": 9},
            {"a_fmax": 3},
            {"precision_factor": "1/2"},
            {"max_lift_bits": 0},
            {"mode": "fast"},
            {"output": "xml"},
        ]
        for overrides in cases:
            with self.subTest(overrides=overrides):
                with self.assertRaises(ConfigError):
                    SolveConfig.from_settings(**overrides)

    def test_working_precision(self):
        self.assertEqual(SolveConfig.from_settings().working_precision(1, 2), 18)
        cfg = SolveConfig.from_settings(precision_factor="3/2")
        self.assertEqual(cfg.precision_factor, Fraction(3, 2))
        self.assertEqual(cfg.working_precision(1, 2), 27)

    def test_same_primes_tried_once(self):
        cfg = SolveConfig.from_settings(prime=7919)
        self.assertEqual(cfg.primes(), [7919])

    def test_to_dict(self):
        data = SolveConfig.from_settings(precision_factor="3/2").to_dict()
        self.assertEqual(data["precision_factor"], "3/2")
        self.assertEqual(data["prime"], 4099)


class TestEnvironment(unittest.TestCase):
    def test_worker_count_cap(self):
        self.assertEqual(worker_count({Settings.THREADS_ENV_VAR: "1"}), 1)

    def test_worker_count_bounds(self):
        count = worker_count({Settings.THREADS_ENV_VAR: "many"})
        self.assertGreaterEqual(count, 1)
        self.assertLessEqual(count, Settings.MAX_WORKERS)
        self.assertLessEqual(worker_count({}), min(cpu_count(), Settings.MAX_WORKERS))

    def test_memory_usage(self):
        self.assertGreaterEqual(memory_usage_mb(), 0.0)


if __name__ == "__main__":
    unittest.main()
