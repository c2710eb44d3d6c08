"""Unit tests for the plain-text report tables."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import unittest

from models.control import OnOffSetpoints
from models.reports import CaseVerdict, GateResult, Limitation, SweepRow
from utils.report_utils import NOT_DEFINED, render_report, sweep_table, verdict_table


class TestReportUtils(unittest.TestCase):
    """Test cases for render_report and its tables."""

    def setUp(self):
        self.failed = CaseVerdict("V", False, Limitation.CREST_FACTOR, crest_ti=6.9098, mu_e_I=0.0053,
                                  details={"gate": GateResult(False, ["crest factor 6.91 >= 4"]).to_dict()})
        self.passed = CaseVerdict("I", True, Limitation.NONE, crest_ti=1.76, mu_e_I=0.02)

    def test_verdict_lines(self):
        text = verdict_table([self.passed.to_dict(), self.failed.to_dict()])
        lines = text.splitlines()
        self.assertEqual(len(lines), 3)
        self.assertIn("CREST_FACTOR", lines[2])
        self.assertIn("limitation", lines[0])

    def test_single_verdict_lists_gate_reasons(self):
        text = render_report(self.failed.to_dict(), title="Case V")
        self.assertTrue(text.startswith("Case V\n======\n"))
        self.assertIn("crest factor 6.91 >= 4", text)

    def test_verdict_list(self):
        text = render_report([self.passed.to_dict(), self.failed.to_dict()])
        self.assertIn("NONE", text)
        self.assertIn("CREST_FACTOR", text)

    def test_sweep_marks_failed_gate_and_undefined_crest(self):
        rows = [SweepRow(4, OnOffSetpoints(16.0, 22.0), None, 0.03, 0.4, 0.5, GateResult(False, ["no"])).to_dict(),
                SweepRow(8, OnOffSetpoints(16.0, 22.0), error="RankDeficient: rank 3").to_dict()]
        text = sweep_table(rows)
        self.assertIn("fail", text)
        self.assertIn(NOT_DEFINED, text)
        self.assertIn("RankDeficient", text)
        self.assertEqual(render_report({"kind": "setpoint_sweep", "rows": rows}), text)

    def test_order_sweep(self):
        rows = [{"order": 2, "report": {"mu_e": 0.1, "sigma_e": 0.1, "fit_percent": 90.0}, "error": None},
                {"order": 40, "report": None, "error": "InsufficientExcitation: too few"}]
        text = render_report({"kind": "order_sweep", "rows": rows})
        self.assertIn("InsufficientExcitation", text)

    def test_comparison(self):
        report = {"kind": "comparison", "per_zone": {"zone1": {"mu_abs": 0.2, "mu_signed": -0.1, "sigma": 0.3}},
                  "energy_ref_J": 1.0e9, "energy_si_J": 1.1e9, "energy_rel_err": 0.1,
                  "peak_freq_ref_hz": 1 / 86400, "peak_freq_si_hz": 1 / 86400}
        text = render_report(report)
        self.assertIn("zone1", text)
        self.assertIn("relative error 0.1", text)

    def test_unknown_document(self):
        with self.assertRaises(ValueError):
            render_report({"kind": "calendar"})


if __name__ == "__main__":
    unittest.main()
