"""Unit tests for the reference simulator and the synthetic climate."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import math
import unittest

import numpy as np

from models.building import Building, HvacConfig, WallBranch, ZoneParams
from models.climate import Climate
from models.control import OnOffController, OnOffSetpoints
from models.sim_result import SimResult, ZoneTrace, zone_series
from models.time_series import TimeSeries
from services.reference_simulator import (
    ReferenceSimulator,
    annual_energy,
    synth_climate,
    total_energy,
)
from utils.building_config import load_building

DT = 3600.0


def constant_climate(n, outdoor=0.0, solar=0.0, humidity=None, dt=DT):
    def series(name, value):
        return TimeSeries(name, "", 0.0, dt, np.full(n, value))

    return Climate(series("To_C", outdoor), series("Qsolar_W", solar),
                   humidity_ratio=None if humidity is None else series("Xo_kgkg", humidity))


def single_zone(**overrides):
    params = dict(air_capacitance=1.0e6, ventilation_conductance=10.0)
    params.update(overrides)
    return Building("box", [ZoneParams("z", **params)])


class TestFreeFloat(unittest.TestCase):
    """Test cases for free-floating thermal runs."""

    def test_equilibrium_is_kept(self):
        simulator = ReferenceSimulator(single_zone(walls=[WallBranch(0.05, 2.0e6)]))
        result = simulator.simulate(constant_climate(48, outdoor=5.0), x0=5.0)
        np.testing.assert_allclose(result.temperature("z").values, 5.0, atol=1e-12)

    def test_step_relaxes_toward_outdoor(self):
        """A single air node decays like exp(-t G / C) toward T_o."""
        simulator = ReferenceSimulator(single_zone())
        result = simulator.simulate(constant_climate(25), x0=20.0)
        t = result.temperature("z").values
        self.assertEqual(t[0], 20.0)
        self.assertTrue(np.all(np.diff(t) < 0))
        self.assertTrue(np.all(t > 0))
        expected = 20.0 * math.exp(-24 * DT * 10.0 / 1.0e6)
        self.assertAlmostEqual(t[-1], expected, delta=0.03 * expected)

    def test_adiabatic_zones_conserve_energy(self):
        """Without any path to outdoor the capacitance-weighted temperature sum is fixed."""
        zones = [ZoneParams("a", 1.0e6, couplings={"b": 5.0}),
                 ZoneParams("b", 2.0e6, couplings={"a": 5.0})]
        simulator = ReferenceSimulator(Building("pair", zones))
        result = simulator.simulate(constant_climate(48, outdoor=-10.0), x0=[30.0, 10.0])
        a = result.temperature("a").values
        b = result.temperature("b").values
        stored = 1.0e6 * a + 2.0e6 * b
        np.testing.assert_allclose(stored, stored[0], rtol=1e-12)
        gap = np.abs(a - b)
        self.assertTrue(np.all(np.diff(gap) <= 1e-12))

    def test_solar_gain_warms(self):
        simulator = ReferenceSimulator(single_zone())
        cold = simulator.simulate(constant_climate(24), x0=0.0)
        sunny = simulator.simulate(constant_climate(24, solar=500.0), x0=0.0)
        self.assertTrue(np.all(sunny.temperature("z").values[1:] > cold.temperature("z").values[1:]))

    def test_recorded_channels(self):
        result = ReferenceSimulator(single_zone()).simulate(constant_climate(6))
        self.assertEqual(result.zone_names, ["z"])
        self.assertEqual(result.source, "reference")
        self.assertTrue(np.all(result.hvac_power("z").values == 0))
        self.assertEqual(result.zones["z"].temperature.name, "Ti_z_C")
        self.assertIsNone(result.zones["z"].internal_gain)

    def test_substep_count(self):
        simulator = ReferenceSimulator(single_zone())
        self.assertEqual(simulator.substeps(3600.0), 60)
        self.assertEqual(simulator.substeps(36000.0), 600)

    def test_substep_count_without_cap(self):
        simulator = ReferenceSimulator(single_zone(), max_substep=1e9)
        self.assertEqual(simulator.substeps(3600.0), 1)
        self.assertEqual(simulator.substeps(36000.0), 8)


class TestOnOff(unittest.TestCase):
    """Test cases for on/off controlled runs."""

    def test_band_within_overshoot_bound(self):
        building = single_zone()
        simulator = ReferenceSimulator(building)
        setpoints = OnOffSetpoints(20.0, 22.0)
        result = simulator.simulate(constant_climate(24 * 7), OnOffController(setpoints), x0=21.0)
        bound = simulator.overshoot_bound(DT)["z"]
        self.assertAlmostEqual(bound, 1500.0 * DT / 1.0e6)
        t = result.temperature("z").values
        self.assertTrue(np.all(t >= setpoints.heating - bound))
        self.assertTrue(np.all(t <= setpoints.cooling + bound))
        heating, _ = annual_energy(result)["z"]
        self.assertGreater(heating, 0.0)

    def test_actuation_levels(self):
        simulator = ReferenceSimulator(single_zone())
        result = simulator.simulate(constant_climate(48, outdoor=35.0), OnOffController(OnOffSetpoints(20.0, 22.0)),
                                    x0=21.0)
        self.assertTrue(set(np.unique(result.hvac_power("z").values)) <= {-1000.0, 0.0, 1500.0})
        self.assertIn(-1000.0, result.hvac_power("z").values)


class TestMoisture(unittest.TestCase):
    """Test cases for simulate_ham."""

    def test_sealed_zone_humidity_grows_linearly(self):
        building = Building("sealed", [ZoneParams("z", 1.0e6, ventilation_conductance=10.0,
                                                  moisture_capacitance=180.0, vapor_production=1.0e-5)],
                            initial_humidity=0.005)
        result = ReferenceSimulator(building).simulate_ham(constant_climate(24, outdoor=20.0, humidity=0.005),
                                                           x0=20.0)
        x = result.zones["z"].humidity_ratio.values
        expected = 0.005 + 1.0e-5 * DT * np.arange(24) / 180.0
        np.testing.assert_allclose(x, expected, rtol=1e-9)
        self.assertEqual(result.warnings, [])

    def test_supersaturation_is_reported(self):
        building = Building("damp", [ZoneParams("z", 1.0e6, ventilation_conductance=10.0,
                                                moisture_capacitance=180.0, vapor_production=1.0e-4)],
                            initial_humidity=0.005)
        result = ReferenceSimulator(building).simulate_ham(constant_climate(12, outdoor=5.0, humidity=0.005),
                                                           x0=5.0)
        rh = result.zones["z"].relative_humidity.values
        self.assertLess(rh[0], 100.0)
        np.testing.assert_array_equal(rh[1:], 100.0)
        saturation = [w for w in result.warnings if w.startswith("Saturation")]
        self.assertEqual(len(saturation), 1)
        self.assertIn("11 sample(s)", saturation[0])

    def test_needs_outdoor_humidity(self):
        with self.assertRaises(ValueError):
            ReferenceSimulator(single_zone()).simulate_ham(constant_climate(4))

    def test_relative_humidity_is_bounded(self):
        building = load_building()
        climate = synth_climate(1, days=3)
        result = ReferenceSimulator(building).simulate_ham(climate)
        for trace in result.zones.values():
            rh = trace.relative_humidity.values
            self.assertTrue(np.all((rh >= 0) & (rh <= 100)))


class TestEnergy(unittest.TestCase):
    """Test cases for annual_energy and total_energy."""

    def test_heating_and_cooling_split(self):
        power = [1000.0, -500.0, 0.0, 2000.0]
        trace = ZoneTrace(zone_series("Ti", "z", 0.0, DT, [20.0] * 4), zone_series("Qhvac", "z", 0.0, DT, power))
        result = SimResult({"z": trace})
        self.assertEqual(annual_energy(result), {"z": (3000.0 * DT, 500.0 * DT)})
        self.assertEqual(total_energy(result), 3500.0 * DT)


class TestSynthClimate(unittest.TestCase):
    """Test cases for synth_climate."""

    def test_year_length_and_start(self):
        climate = synth_climate(7)
        self.assertEqual(len(climate), 8760)
        self.assertEqual(climate.t0, 1609459200.0)
        self.assertTrue(climate.has_humidity)

    def test_seeded_determinism(self):
        first = synth_climate(3, days=10)
        second = synth_climate(3, days=10)
        other = synth_climate(4, days=10)
        self.assertEqual(first.outdoor_temperature, second.outdoor_temperature)
        self.assertEqual(first.humidity_ratio, second.humidity_ratio)
        self.assertNotEqual(first.outdoor_temperature, other.outdoor_temperature)

    def test_no_sun_at_midnight(self):
        climate = synth_climate(5, days=30)
        midnight = climate.irradiance.values[::24]
        self.assertTrue(np.all(midnight == 0))
        self.assertTrue(np.all(climate.irradiance.values >= 0))
        self.assertGreater(climate.irradiance.values.max(), 0)

    def test_heat_wave_lifts_june(self):
        with_wave = synth_climate(2, days=200)
        without = synth_climate(2, days=200, heat_wave=False)
        june = slice(164 * 24, 167 * 24)
        self.assertGreater(with_wave.outdoor_temperature.values[june].mean(),
                           without.outdoor_temperature.values[june].mean() + 5.0)

    def test_period_must_divide_a_day(self):
        with self.assertRaises(ValueError):
            synth_climate(1, days=2, dt=7000.0)


class TestCanonicalBuilding(unittest.TestCase):

    def test_four_zone_free_float_is_finite(self):
        building = load_building()
        self.assertEqual(building.zone_names, ["zone1", "zone2", "zone3", "zone4"])
        result = ReferenceSimulator(building).simulate(synth_climate(0, days=2))
        self.assertEqual(len(result), 48)
        self.assertTrue(np.all(np.isfinite(result.temperature_matrix())))

    def test_unknown_hvac_defaults(self):
        self.assertEqual(single_zone().hvac.heating_capacity, HvacConfig().heating_capacity)


if __name__ == "__main__":
    unittest.main()
