"""Unit tests for CaseConfig and RunConfig."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import tempfile
import unittest

from models.run_config import CaseConfig, RunConfig


class TestCaseConfig(unittest.TestCase):

    def test_defaults(self):
        config = CaseConfig()
        self.assertEqual(config.sensor_noise, 0.001)
        self.assertEqual(config.sigma_ratio, 1.5)
        self.assertTrue(config.identification.stabilize)
        self.assertTrue(config.identification.refine)
        self.assertEqual(config.order_for("V"), 8)

    def test_invalid_sigma_ratio(self):
        with self.assertRaises(ValueError):
            CaseConfig(sigma_ratio=0.0)

    def test_fine_window_must_fit(self):
        with self.assertRaises(ValueError):
            CaseConfig(days=20)


class TestRunConfig(unittest.TestCase):

    def test_missing_input_is_reported(self):
        config = RunConfig(input_paths=["/nonexistent/climate.csv"])
        with self.assertRaises(FileNotFoundError):
            config.check_paths()

    def test_existing_inputs_pass(self):
        with tempfile.NamedTemporaryFile(suffix=".json") as handle:
            RunConfig(input_paths=[handle.name]).check_paths()

    def test_output_directory_is_created(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = RunConfig(out_dir=str(Path(tmp) / "runs" / "a"))
            path = config.output_path("verdict.json")
            self.assertTrue(path.parent.is_dir())

    def test_invalid_workers(self):
        with self.assertRaises(ValueError):
            RunConfig(workers=0)


if __name__ == "__main__":
    unittest.main()
