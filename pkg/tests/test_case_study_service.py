"""Unit tests for case_study_service on short synthetic years."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import math
import tempfile
import unittest
from unittest import mock

import numpy as np

from models.control import LoopTopology, OnOffSetpoints
from models.reports import CaseVerdict, Limitation
from models.run_config import CaseConfig
from services.case_study_service import CaseStudyService, hvac_excited, model_signals
from services.control_service import UnstableLoop
from utils.model_io import write_json

DAYS = 30


def short_config(**overrides):
    params = dict(days=DAYS, fine_start_day=5, fine_days=3, fine_factor=4)
    params.update(overrides)
    return CaseConfig(**params)


def check_verdict(test, verdict, case_id):
    """Invariants every verdict honours."""
    test.assertIsInstance(verdict, CaseVerdict)
    test.assertEqual(verdict.case_id, case_id)
    if not verdict.possible:
        test.assertIsNot(verdict.limitation, Limitation.NONE)
    else:
        test.assertIs(verdict.limitation, Limitation.NONE)
    data = verdict.to_dict()
    test.assertEqual(data["case"], case_id)
    test.assertIn(data["limitation"], {item.value for item in Limitation})


class TestModelSignals(unittest.TestCase):
    """Test cases for model_signals and hvac_excited."""

    @classmethod
    def setUpClass(cls):
        cls.service = CaseStudyService(short_config(days=4, fine_start_day=0, fine_days=2))
        cls.on_off = cls.service.reference_run(0, OnOffSetpoints(18.0, 22.0))
        cls.free = cls.service.reference_run(0)
        cls.ham = cls.service.reference_run(0, OnOffSetpoints(18.0, 22.0, 35.0, 65.0), ham=True)

    def test_free_float_layout(self):
        inputs, outputs = model_signals(self.free, "zone1", None)
        self.assertEqual([s.name for s in inputs], ["To_C", "Qsol_zone1_W"])
        self.assertEqual([s.name for s in outputs], ["Ti_zone1_C"])

    def test_separate_layout(self):
        inputs, _ = model_signals(self.on_off, "zone1", LoopTopology.HVAC_SEPARATE_INPUT)
        self.assertEqual(len(inputs), 3)
        self.assertEqual(inputs[2].name, "Qhvac_zone1_W")

    def test_added_layout_sums_hvac_into_solar(self):
        inputs, _ = model_signals(self.on_off, "zone1", LoopTopology.HVAC_ADDED_TO_SOLAR)
        trace = self.on_off.zones["zone1"]
        self.assertEqual(len(inputs), 2)
        self.assertEqual(inputs[1].name, "Qsol+Qhvac_zone1_W")
        np.testing.assert_allclose(inputs[1].values, trace.solar_gain.values + trace.hvac_power.values)

    def test_moisture_layout(self):
        inputs, outputs = model_signals(self.ham, "zone2", LoopTopology.HVAC_SEPARATE_INPUT, moisture=True)
        self.assertEqual(len(inputs), 5)
        self.assertEqual(inputs[3].name, "Xo_kgkg")
        self.assertEqual(inputs[4].name, "Mhvac+Gvap_zone2_kgs")
        self.assertEqual([s.name for s in outputs], ["Ti_zone2_C", "Xi_zone2_kgkg"])

    def test_missing_channels(self):
        with self.assertRaises(ValueError):
            model_signals(self.free, "zone1", None, internal_gain=True)
        with self.assertRaises(ValueError):
            model_signals(self.free, "zone1", None, moisture=True)
        with self.assertRaises(ValueError):
            model_signals(self.free, "attic", None)

    def test_hvac_excitation(self):
        self.assertFalse(hvac_excited(self.free, "zone1"))
        self.assertTrue(hvac_excited(self.on_off, "zone1"))

    def test_reference_runs_are_cached(self):
        self.assertIs(self.service.reference_run(0), self.free)


class TestCases(unittest.TestCase):
    """Test cases for run_case."""

    @classmethod
    def setUpClass(cls):
        cls.service = CaseStudyService(short_config())

    def test_unknown_case(self):
        with self.assertRaises(ValueError):
            self.service.run_case("VI")

    def test_free_float_case(self):
        verdict = self.service.run_case("I")
        check_verdict(self, verdict, "I")
        self.assertEqual(verdict.errors, [])
        self.assertTrue(math.isfinite(verdict.mu_e_I))
        self.assertEqual(verdict.details["topology"], "free-float")
        self.assertEqual(verdict.possible, verdict.details["gate"]["passed"])
        self.assertEqual(set(verdict.report.per_zone), {"zone1"})

    def test_added_topology_verdict_follows_sigma_ratio(self):
        verdict = self.service.run_case("II")
        check_verdict(self, verdict, "II")
        ratio = verdict.details["sigma_ratio"]
        self.assertIsNotNone(ratio)
        self.assertEqual(verdict.possible, ratio < verdict.details["sigma_ratio_limit"])

    def test_sigma_ratio_limit_decides_added_topology(self):
        strict = CaseStudyService(short_config(sigma_ratio=1e-6)).run_case("II")
        lenient = CaseStudyService(short_config(sigma_ratio=1e6)).run_case("II")
        self.assertIs(strict.limitation, Limitation.LACKING_TRANSFER_INFO)
        self.assertTrue(lenient.possible)
        self.assertEqual(strict.details["sigma_ratio"], lenient.details["sigma_ratio"])

    def test_timing_is_opt_in(self):
        verdict = self.service.run_case("III")
        self.assertIsNotNone(verdict.timing)
        self.assertGreater(verdict.timing.speedup, 0.0)
        self.assertNotIn("timing", verdict.to_dict())
        self.assertEqual(set(verdict.to_dict(include_timing=True)["timing"]),
                         {"runtime_ref_s", "runtime_si_s", "speedup"})

    def test_unstable_loop_is_recorded_not_measured(self):
        diverging = UnstableLoop(3, "T_i is not finite at step 3")
        with mock.patch("services.case_study_service.simulate_closed_loop", side_effect=diverging):
            verdict = self.service.run_case("III")
        self.assertFalse(verdict.possible)
        self.assertIs(verdict.limitation, Limitation.LACKING_TRANSFER_INFO)
        self.assertIsNone(verdict.report)
        self.assertEqual(verdict.errors, ["UnstableLoop: T_i is not finite at step 3"])

    def test_same_seed_gives_byte_identical_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            paths = []
            for run in range(2):
                verdict = CaseStudyService(short_config()).run_case("III", seed=3)
                paths.append(write_json(Path(tmp) / f"verdict_{run}.json", verdict.to_dict()))
            self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())

    def test_on_off_case(self):
        verdict = self.service.run_case("III")
        check_verdict(self, verdict, "III")
        self.assertEqual(verdict.details["order"], 4)
        self.assertIn("aggregate", verdict.details["within_band_pct"])

    def test_fine_step_case(self):
        verdict = self.service.run_case("IV")
        check_verdict(self, verdict, "IV")
        self.assertIn(verdict.limitation, (Limitation.NONE, Limitation.TIME_STEP_FAST_DYNAMICS))
        self.assertEqual(verdict.details["fine_dt"], 900.0)
        self.assertLessEqual(verdict.details["switches_per_hour_si_hourly"], 1.0)

    def test_external_case(self):
        verdict = self.service.run_case("EXT")
        check_verdict(self, verdict, "EXT")
        if verdict.errors:
            self.assertIs(verdict.limitation, Limitation.LACKING_TRANSFER_INFO)
            return
        self.assertEqual(verdict.details["source"], "reference")
        self.assertTrue(0.0 <= verdict.details["within_band_pct"] <= 100.0)

    def test_pipeline_error_becomes_lacking_transfer_info(self):
        service = CaseStudyService(short_config(orders={"I": 200}))
        verdict = service.run_case("I")
        check_verdict(self, verdict, "I")
        self.assertFalse(verdict.possible)
        self.assertIs(verdict.limitation, Limitation.LACKING_TRANSFER_INFO)
        self.assertTrue(verdict.errors[0].startswith("InsufficientExcitation"))

    def test_unknown_zone(self):
        with self.assertRaises(ValueError):
            CaseStudyService(short_config(zone="attic"))


class TestSetpointSweep(unittest.TestCase):
    """Test cases for setpoint_sweep."""

    @classmethod
    def setUpClass(cls):
        cls.service = CaseStudyService(short_config())

    def test_empty_pairs_rejected(self):
        with self.assertRaises(ValueError):
            self.service.setpoint_sweep([], [4])

    def test_empty_orders(self):
        self.assertEqual(self.service.setpoint_sweep([(18.0, 22.0)], []), [])

    def test_rows_ordered_by_pair_then_order(self):
        rows = self.service.setpoint_sweep([(18.0, 22.0), (20.0, 22.0)], [4, 2])
        self.assertEqual([(row.setpoints.heating, row.order) for row in rows],
                         [(18.0, 2), (18.0, 4), (20.0, 2), (20.0, 4)])
        for row in rows:
            data = row.to_dict()
            if row.error is None:
                self.assertIsNotNone(data["gate"])
                self.assertEqual(data["gate"]["passed"], row.gate.passed)
                self.assertTrue(math.isfinite(row.mu_e_II))

    def test_failing_order_recorded(self):
        rows = self.service.setpoint_sweep([(18.0, 22.0)], [200])
        self.assertEqual(len(rows), 1)
        self.assertIn("InsufficientExcitation", rows[0].error)
        self.assertEqual(rows[0].to_dict()["T_h_id"], 18.0)


if __name__ == "__main__":
    unittest.main()
