"""End-to-end tests of the command-line driver on short runs."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import contextlib
import io
import json
import shutil
import tempfile
import unittest

import driver
from utils.csv_io import read_climate, read_result
from utils.model_io import load_model, read_json


def run(*argv):
    """Run the driver and return (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = driver.main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


class TestDriver(unittest.TestCase):
    """Test cases for the driver commands."""

    @classmethod
    def setUpClass(cls):
        cls.dir = Path(tempfile.mkdtemp())
        code, _, err = run("simulate", "--days", 20, "--setpoints", "18,22", "--out", cls.dir)
        assert code == 0, err
        cls.simulation = cls.dir / "simulation.csv"

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.dir)

    def test_synth(self):
        out = self.dir / "synth"
        code, stdout, _ = run("synth", "--days", 2, "--seed", 3, "--out", out)
        self.assertEqual(code, 0)
        self.assertEqual(len(read_climate(out / "climate.csv")), 48)
        self.assertIn("48 samples", stdout)

    def test_simulation_file(self):
        result = read_result(self.simulation)
        self.assertEqual(result.zone_names, ["zone1", "zone2", "zone3", "zone4"])
        self.assertEqual(len(result), 480)

    def test_identify_then_loop_then_report(self):
        out = self.dir / "pipeline"
        code, stdout, err = run("identify", self.simulation, "--orders", "2,4", "--out", out)
        self.assertEqual(code, 0, err)
        sweep = read_json(out / "order_sweep.json")
        self.assertEqual(sweep["kind"], "order_sweep")
        self.assertEqual([row["order"] for row in sweep["rows"]], [2, 4])
        model = load_model(out / "model.json")
        self.assertEqual(model.n_inputs, 3)

        code, stdout, err = run("loop", out / "model.json", "--reference", self.simulation,
                                "--setpoints", "18,22", "--out", out)
        self.assertEqual(code, 0, err)
        self.assertIn("within band", stdout)
        comparison = read_json(out / "comparison.json")
        self.assertEqual(comparison["kind"], "comparison")
        self.assertIn("zone1", comparison["per_zone"])

        code, stdout, err = run("report", out / "comparison.json", out / "order_sweep.json", "--out", out)
        self.assertEqual(code, 0, err)
        self.assertTrue((out / "report.txt").is_file())
        self.assertIn("comparison.json", stdout)

    def test_diagnose(self):
        out = self.dir / "diag"
        code, _, err = run("diagnose", self.simulation, "--out", out)
        self.assertEqual(code, 0, err)
        names = [entry["name"] for entry in read_json(out / "diagnostics.json")["series"]]
        self.assertIn("Ti_zone1_C", names)
        self.assertTrue((out / "spectrum_To_C.csv").is_file())

    def test_missing_input_exits_with_json_error(self):
        code, _, err = run("identify", self.dir / "absent.csv", "--out", self.dir)
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(err.strip().splitlines()[-1])["error"], "FileNotFoundError")

    def test_malformed_csv_exits_with_format_error(self):
        path = self.dir / "bad.csv"
        path.write_text("#To_C,degC,0,3600\nTo_C\n1\nwarm\n")
        code, _, err = run("diagnose", path, "--out", self.dir)
        self.assertEqual(code, 2)
        payload = json.loads(err.strip().splitlines()[-1])
        self.assertEqual(payload["error"], "FormatError")
        self.assertIn("line 4", payload["message"])

    def test_case_timing_is_opt_in(self):
        plain = self.dir / "case_plain"
        timed = self.dir / "case_timed"
        code, stdout, err = run("case", "III", "--days", 30, "--out", plain)
        self.assertEqual(code, 0, err)
        self.assertNotIn("timing", read_json(plain / "caseIII_verdict.json"))
        self.assertIn("speedup", stdout)

        code, _, err = run("case", "III", "--days", 30, "--timing", "--out", timed)
        self.assertEqual(code, 0, err)
        timing = read_json(timed / "caseIII_verdict.json")["timing"]
        self.assertGreater(timing["speedup"], 0.0)

    def test_unknown_case_id(self):
        code, _, err = run("case", "VII", "--days", 4, "--out", self.dir)
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(err.strip().splitlines()[-1])["error"], "ValueError")


if __name__ == "__main__":
    unittest.main()
