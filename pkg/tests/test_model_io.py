"""Unit tests for model and report JSON files."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import json
import math
import tempfile
import unittest
from unittest import mock

import numpy as np

from models.output_error_model import OEChannel, OutputErrorModel
from models.state_space_model import StateSpaceModel
from utils.csv_io import FormatError
from utils.model_io import finite_only, load_model, model_from_dict, read_json, save_model, write_json


class TestModelIo(unittest.TestCase):
    """Test cases for save_model, load_model and the JSON helpers."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_state_space_model_reloads(self):
        model = StateSpaceModel([[0.9, 0.1], [0.0, 0.5]], [[1.0, 0.2], [0.0, 1.0]], [[1.0, 0.0]],
                                [[0.0, 0.01]], 3600.0, input_labels=["To_C", "Qhvac_zone1_W"],
                                output_labels=["Ti_zone1_C"], metadata={"horizon": 10})
        loaded = load_model(save_model(self.dir / "model.json", model))
        np.testing.assert_array_equal(loaded.A, model.A)
        np.testing.assert_array_equal(loaded.D, model.D)
        self.assertEqual(loaded.dt, 3600.0)
        self.assertEqual(loaded.input_labels, model.input_labels)
        self.assertEqual(loaded.metadata, {"horizon": 10})

    def test_continuous_model_keeps_marker(self):
        model = StateSpaceModel([[-1e-4]], [[1e-6]], [[1.0]], [[0.0]], None)
        data = json.loads(save_model(self.dir / "c.json", model).read_text())
        self.assertEqual(data["dt"], "continuous")
        self.assertTrue(load_model(self.dir / "c.json").is_continuous)

    def test_output_error_model_reloads(self):
        model = OutputErrorModel([OEChannel([0.5, 0.3], [1.0, -0.8], 1, "u")], 3600.0, output_label="y")
        loaded = load_model(save_model(self.dir / "oe.json", model))
        self.assertIsInstance(loaded, OutputErrorModel)
        np.testing.assert_array_equal(loaded.channels[0].f, [1.0, -0.8])
        self.assertEqual(loaded.channels[0].nk, 1)

    def test_unknown_type(self):
        with self.assertRaises(FormatError) as caught:
            model_from_dict({"type": "neural"})
        self.assertEqual(caught.exception.column, "type")

    def test_malformed_matrix(self):
        data = StateSpaceModel([[0.5]], [[1.0]], [[1.0]], [[0.0]], 60.0).to_dict()
        data["A"]["rows"] = 2
        with self.assertRaises(FormatError):
            model_from_dict(data)

    def test_invalid_json_reports_line(self):
        path = self.dir / "broken.json"
        path.write_text('{\n  "type": "state_space",\n  "dt": \n}\n')
        with self.assertRaises(FormatError) as caught:
            read_json(path)
        self.assertEqual(caught.exception.line, 4)

    def test_non_finite_values_become_null(self):
        self.assertEqual(finite_only({"a": [1.0, math.inf], "b": (math.nan, "x")}),
                         {"a": [1.0, None], "b": [None, "x"]})
        path = write_json(self.dir / "r.json", {"energy_rel_err": math.inf, "mu_abs": 0.25})
        self.assertEqual(read_json(path), {"energy_rel_err": None, "mu_abs": 0.25})

    def test_interrupted_replace_keeps_previous_file(self):
        path = write_json(self.dir / "verdict.json", {"possible": True})
        with mock.patch("utils.csv_io.os.replace", side_effect=OSError("interrupted")):
            with self.assertRaises(OSError):
                write_json(path, {"possible": False})
        self.assertEqual(read_json(path), {"possible": True})
        self.assertEqual(sorted(p.name for p in self.dir.iterdir()), ["verdict.json"])

    def test_rewrite_replaces_content(self):
        path = write_json(self.dir / "out" / "verdict.json", {"possible": True})
        write_json(path, {"possible": False})
        self.assertEqual(read_json(path), {"possible": False})
        self.assertEqual([p.name for p in path.parent.iterdir()], ["verdict.json"])


if __name__ == "__main__":
    unittest.main()
