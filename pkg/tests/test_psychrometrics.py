"""Unit tests for the psychrometric helpers."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from utils.psychrometrics import is_saturated, rh_from_tx, rh_sensitivities, saturation_pressure, x_from_trh

P = 101325.0


class TestPsychrometrics(unittest.TestCase):
    """Test cases for rh_from_tx and its companions."""

    def test_dry_air(self):
        self.assertEqual(rh_from_tx(20.0, 0.0, P), 0.0)

    def test_saturation_pressure_at_twenty(self):
        """Magnus gives about 2.33 kPa at 20 degC."""
        self.assertAlmostEqual(float(saturation_pressure(20.0)), 2332.6, delta=1.0)

    def test_table_value(self):
        """X = 0.00726 kg/kg at 20 degC is close to 50 % RH."""
        self.assertAlmostEqual(rh_from_tx(20.0, 0.00726, P), 50.0, delta=0.5)

    def test_round_trip_at_twenty(self):
        self.assertAlmostEqual(rh_from_tx(20.0, x_from_trh(20.0, 50.0, P), P), 50.0, delta=1e-9)

    def test_clamp_and_flag(self):
        x = x_from_trh(10.0, 100.0, P) * 1.2
        self.assertEqual(rh_from_tx(10.0, x, P), 100.0)
        self.assertTrue(is_saturated(10.0, x, P))

    def test_arrays(self):
        t = np.array([0.0, 10.0, 20.0])
        rh = rh_from_tx(t, x_from_trh(t, np.array([30.0, 60.0, 90.0]), P), P)
        np.testing.assert_allclose(rh, [30.0, 60.0, 90.0], atol=1e-9)

    @given(st.floats(-40.0, 60.0), st.floats(0.0, 100.0))
    @settings(max_examples=100, deadline=None)
    def test_round_trip_property(self, temperature, relative_humidity):
        x = x_from_trh(temperature, relative_humidity, P)
        self.assertAlmostEqual(rh_from_tx(temperature, x, P), relative_humidity, delta=1e-9)

    def test_sensitivities_match_finite_differences(self):
        t, x = 21.0, 0.008
        d_t, d_x = rh_sensitivities(t, x, P)
        h_t, h_x = 1e-4, 1e-8
        fd_t = (rh_from_tx(t + h_t, x, P) - rh_from_tx(t - h_t, x, P)) / (2 * h_t)
        fd_x = (rh_from_tx(t, x + h_x, P) - rh_from_tx(t, x - h_x, P)) / (2 * h_x)
        self.assertAlmostEqual(float(d_t), fd_t, delta=1e-5 * abs(fd_t))
        self.assertAlmostEqual(float(d_x), fd_x, delta=1e-5 * abs(fd_x))


if __name__ == "__main__":
    unittest.main()
