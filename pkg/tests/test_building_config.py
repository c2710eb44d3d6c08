"""Unit tests for building configuration files."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import unittest

from utils.building_config import ConfigError, load_building, parse_building

TWO_ZONES = """
[building]
name = pair
initial_temperature = 19

[hvac]
heating_capacity = 2000

[zone:a]
air_capacitance = 1e6
walls = 0.05:2e6
ventilation_conductance = 10
couplings = b:4

[zone:b]
air_capacitance = 2e6
mass_resistance = 0.004
mass_capacitance = 4e6
solar_to_mass = 0.5
"""


class TestBuildingConfig(unittest.TestCase):
    """Test cases for parse_building and load_building."""

    def test_parse_two_zones(self):
        building = parse_building(TWO_ZONES)
        self.assertEqual(building.name, "pair")
        self.assertEqual(building.zone_names, ["a", "b"])
        self.assertEqual(building.initial_temperature, 19.0)
        self.assertEqual(building.hvac.heating_capacity, 2000.0)
        self.assertEqual(building.hvac.cooling_capacity, 1000.0)
        self.assertEqual(building.zone("a").walls[0].resistance, 0.05)
        self.assertEqual(building.zone("b").couplings, {"a": 4.0})
        self.assertTrue(building.zone("b").has_mass)

    def test_network_size(self):
        network = parse_building(TWO_ZONES).thermal_network()
        self.assertEqual(network.names, ["a.air", "a.wall0", "b.air", "b.mass"])

    def test_canonical_building(self):
        building = load_building()
        self.assertEqual(len(building.zones), 4)
        self.assertEqual(building.hvac.heating_capacity, 1500.0)
        for zone in building.zones:
            self.assertEqual(len(zone.couplings), 2)

    def test_missing_building_section(self):
        with self.assertRaises(ConfigError):
            parse_building("[zone:a]\nair_capacitance = 1e6\n")

    def test_no_zones(self):
        with self.assertRaises(ConfigError):
            parse_building("[building]\nname = empty\n")

    def test_bad_number(self):
        with self.assertRaises(ConfigError) as caught:
            parse_building(TWO_ZONES.replace("ventilation_conductance = 10", "ventilation_conductance = ten"))
        self.assertIn("ventilation_conductance", str(caught.exception))

    def test_bad_wall_entry(self):
        with self.assertRaises(ConfigError):
            parse_building(TWO_ZONES.replace("walls = 0.05:2e6", "walls = 0.05"))

    def test_asymmetric_coupling(self):
        with self.assertRaises(ConfigError):
            parse_building(TWO_ZONES + "couplings = a:5\n")

    def test_invalid_value(self):
        with self.assertRaises(ConfigError):
            parse_building(TWO_ZONES.replace("air_capacitance = 1e6", "air_capacitance = -1"))

    def test_zero_wall_resistance_is_rejected(self):
        with self.assertRaises(ConfigError) as caught:
            parse_building(TWO_ZONES.replace("walls = 0.05:2e6", "walls = 0:2e6"))
        self.assertIn("resistance must be positive", str(caught.exception))

    def test_zero_mass_resistance_is_rejected(self):
        with self.assertRaises(ConfigError) as caught:
            parse_building(TWO_ZONES.replace("mass_resistance = 0.004", "mass_resistance = 0"))
        self.assertIn("resistance must be positive", str(caught.exception))

    def test_zero_conductance_means_no_link(self):
        building = parse_building(TWO_ZONES.replace("ventilation_conductance = 10",
                                                    "ventilation_conductance = 0"))
        self.assertEqual(building.zones[0].ventilation_conductance, 0.0)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_building("/nonexistent/building.cfg")


if __name__ == "__main__":
    unittest.main()
