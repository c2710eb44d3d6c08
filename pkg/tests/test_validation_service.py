"""Unit tests for validation_service."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import math
import unittest

import numpy as np
from hypothesis import assume, given, settings, strategies as st

from models.sim_result import SimResult, ZoneTrace, zone_series
from services.validation_service import (
    CREST_LIMIT,
    ERROR_LIMIT_DEGC,
    GridMismatch,
    accuracy_gate,
    compare,
    timing_report,
)
from utils.psychrometrics import rh_from_tx

DT = 3600.0
P = 101325.0


def run(temperatures, power=None, zone="z", runtime=1.0, dt=DT, humidity=None):
    n = len(temperatures)
    power = [0.0] * n if power is None else power
    channels = {
        "temperature": zone_series("Ti", zone, 0.0, dt, temperatures),
        "hvac_power": zone_series("Qhvac", zone, 0.0, dt, power),
    }
    if humidity is not None:
        channels["humidity_ratio"] = zone_series("Xi", zone, 0.0, dt, humidity)
        channels["relative_humidity"] = zone_series(
            "RHi", zone, 0.0, dt, rh_from_tx(np.asarray(temperatures), np.asarray(humidity), P))
    return SimResult({zone: ZoneTrace(**channels)}, runtime_s=runtime)


class TestCompare(unittest.TestCase):
    """Test cases for compare."""

    def test_error_statistics(self):
        reference = run([20.0, 21.0, 22.0, 23.0])
        candidate = run([20.5, 21.0, 21.5, 23.0])
        report = compare(reference, candidate)
        self.assertAlmostEqual(report.mu_abs, 0.25)
        self.assertAlmostEqual(report.mu_signed, 0.0)
        self.assertAlmostEqual(report.sigma, math.sqrt(0.125))
        self.assertEqual(set(report.per_zone), {"z"})

    def test_identical_runs(self):
        reference = run([20.0, 21.0, 22.0, 23.0], [1000.0, 0.0, -500.0, 0.0])
        report = compare(reference, reference)
        self.assertEqual(report.mu_abs, 0.0)
        self.assertEqual(report.energy_rel_err, 0.0)
        self.assertEqual(report.energy_ref, 1500.0 * DT)

    def test_swapping_runs_flips_the_sign(self):
        rng = np.random.default_rng(0)
        a = run(20.0 + rng.normal(size=48), 1000.0 * rng.integers(0, 2, size=48))
        b = run(20.0 + rng.normal(size=48), 1000.0 * rng.integers(0, 2, size=48))
        forward, backward = compare(a, b), compare(b, a)
        self.assertAlmostEqual(forward.mu_abs, backward.mu_abs, places=12)
        self.assertAlmostEqual(forward.mu_signed, -backward.mu_signed, places=12)
        self.assertAlmostEqual(forward.sigma, backward.sigma, places=12)

    def test_energy_error_against_zero_reference(self):
        report = compare(run([20.0] * 4), run([20.0] * 4, [100.0, 0.0, 0.0, 0.0]))
        self.assertTrue(math.isinf(report.energy_rel_err))
        self.assertIsNone(report.to_dict()["energy_rel_err"])

    def test_grid_mismatch(self):
        with self.assertRaises(GridMismatch):
            compare(run([20.0] * 4), run([20.0] * 5))
        with self.assertRaises(GridMismatch):
            compare(run([20.0] * 4), run([20.0] * 4, dt=60.0))

    def test_no_common_zone(self):
        with self.assertRaises(GridMismatch):
            compare(run([20.0] * 4, zone="a"), run([20.0] * 4, zone="b"))

    def test_humidity_error_split(self):
        """A pure humidity error shows up as RH error from X only."""
        t = [21.0] * 6
        reference = run(t, humidity=[0.007] * 6)
        candidate = run(t, humidity=[0.0075] * 6)
        extras = compare(reference, candidate).extras["z"]
        self.assertAlmostEqual(extras["mu_abs_X"], 0.0005)
        self.assertEqual(extras["mu_abs_RH_from_T"], 0.0)
        self.assertGreater(extras["mu_abs_RH_from_X"], 0.0)
        self.assertLess(extras["mu_abs_RH_residual"], 0.05 * extras["mu_abs_RH"])


class TestAccuracyGate(unittest.TestCase):
    """Test cases for accuracy_gate."""

    def test_default_limits(self):
        self.assertEqual(CREST_LIMIT, 4.0)
        self.assertEqual(ERROR_LIMIT_DEGC, 0.05)

    def test_passing_examples(self):
        self.assertTrue(accuracy_gate(1.76, 0.02).passed)
        self.assertTrue(accuracy_gate(3.99, 0.0499).passed)
        self.assertEqual(accuracy_gate(1.76, 0.02).reasons, [])

    def test_large_crest_factor_fails(self):
        gate = accuracy_gate(6.9098, 0.0053)
        self.assertFalse(gate.passed)
        self.assertEqual(len(gate.reasons), 1)
        self.assertIn("crest factor", gate.reasons[0])

    def test_limits_are_strict(self):
        self.assertFalse(accuracy_gate(4.0, 0.01).passed)
        self.assertFalse(accuracy_gate(2.0, 0.05).passed)

    def test_both_conditions_reported(self):
        self.assertEqual(len(accuracy_gate(5.0, 0.2).reasons), 2)

    def test_undefined_crest_fails(self):
        gate = accuracy_gate(None, 0.01)
        self.assertFalse(gate)
        self.assertIn("not defined", gate.reasons[0])

    def test_non_finite_error_rejected(self):
        with self.assertRaises(ValueError):
            accuracy_gate(2.0, float("nan"))

    @given(st.floats(1.0, 10.0), st.floats(0.0, 0.2), st.floats(1.0, 10.0), st.floats(0.0, 0.2))
    @settings(max_examples=200, deadline=None)
    def test_monotone(self, crest, error, other_crest, other_error):
        """Lowering either input never turns a pass into a fail."""
        assume(other_crest <= crest and other_error <= error)
        if accuracy_gate(crest, error).passed:
            self.assertTrue(accuracy_gate(other_crest, other_error).passed)


class TestTimingReport(unittest.TestCase):
    """Test cases for timing_report."""

    def test_speedup(self):
        report = timing_report(run([20.0] * 24, runtime=10.0), run([20.0] * 24, runtime=0.1))
        self.assertAlmostEqual(report.speedup, 100.0)
        self.assertEqual(set(report.to_dict()), {"runtime_ref_s", "runtime_si_s", "speedup"})

    def test_same_horizon_at_other_period(self):
        report = timing_report(run([20.0] * 24, runtime=2.0), run([20.0] * 48, dt=1800.0, runtime=1.0))
        self.assertAlmostEqual(report.speedup, 2.0)

    def test_horizon_mismatch(self):
        with self.assertRaises(GridMismatch):
            timing_report(run([20.0] * 24), run([20.0] * 12))


if __name__ == "__main__":
    unittest.main()
