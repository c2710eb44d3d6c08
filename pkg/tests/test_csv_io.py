"""Unit tests for the time-series CSV files."""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import tempfile
import unittest
from unittest import mock

import numpy as np
import pandas as pd

from models.time_series import TimeSeries
from services.reference_simulator import ReferenceSimulator, synth_climate
from utils.building_config import load_building
from utils.csv_io import FormatError, read_climate, read_result, read_series, write_climate, write_result, write_series


class TestCsvIo(unittest.TestCase):
    """Test cases for read_series and write_series."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write_text(self, text, name="data.csv"):
        path = self.dir / name
        path.write_text(text)
        return path

    def test_values_survive_bit_exactly(self):
        rng = np.random.default_rng(0)
        series = [TimeSeries("To_C", "degC", 1609459200.0, 3600.0, rng.normal(size=50) * 1e-3 + 1.0 / 3.0),
                  TimeSeries("Qsolar_W", "W", 1609459200.0, 3600.0, rng.uniform(0, 800, size=50))]
        path = write_series(self.dir / "out" / "series.csv", series)
        self.assertEqual(read_series(path), series)

    def test_metadata_lines_come_first(self):
        path = write_series(self.dir / "s.csv", [TimeSeries("a", "W", 0.0, 60.0, [1.0, 2.0])])
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "#a,W,0.0,60.0")
        self.assertEqual(lines[1], "a")

    def test_failed_write_keeps_previous_file(self):
        path = write_series(self.dir / "s.csv", [TimeSeries("a", "W", 0.0, 60.0, [1.0, 2.0])])
        before = path.read_text()
        with mock.patch.object(pd.DataFrame, "to_csv", side_effect=OSError("disk full")):
            with self.assertRaises(OSError):
                write_series(path, [TimeSeries("a", "W", 0.0, 60.0, [3.0, 4.0, 5.0])])
        self.assertEqual(path.read_text(), before)
        self.assertEqual(sorted(p.name for p in self.dir.iterdir()), ["s.csv"])

    def test_overwrite_leaves_no_temporary_files(self):
        path = self.dir / "s.csv"
        for values in ([1.0], [2.0, 3.0]):
            write_series(path, [TimeSeries("a", "W", 0.0, 60.0, values)])
        self.assertEqual(read_series(path)[0].values.tolist(), [2.0, 3.0])
        self.assertEqual(sorted(p.name for p in self.dir.iterdir()), ["s.csv"])

    def test_non_numeric_cell_is_located(self):
        path = self.write_text("#a,,0.0,3600.0\n#b,,0.0,3600.0\na,b\n1,2\n3,x\n")
        with self.assertRaises(FormatError) as caught:
            read_series(path)
        self.assertEqual(caught.exception.line, 5)
        self.assertEqual(caught.exception.column, "b")

    def test_empty_cell_is_located(self):
        path = self.write_text("a,b\n1,2\n3,\n")
        with self.assertRaises(FormatError) as caught:
            read_series(path, dt=3600.0)
        self.assertEqual(caught.exception.line, 3)
        self.assertEqual(caught.exception.column, "b")

    def test_missing_dt(self):
        path = self.write_text("a\n1\n2\n")
        with self.assertRaises(FormatError) as caught:
            read_series(path)
        self.assertEqual(caught.exception.column, "a")
        series = read_series(path, dt=60.0, t0=100.0)
        self.assertEqual(series, [TimeSeries("a", "", 100.0, 60.0, [1.0, 2.0])])

    def test_bad_metadata(self):
        path = self.write_text("#a,degC,zero,3600\na\n1\n")
        with self.assertRaises(FormatError) as caught:
            read_series(path)
        self.assertEqual(caught.exception.line, 1)

    def test_missing_file(self):
        with self.assertRaises(FormatError):
            read_series(self.dir / "absent.csv")

    def test_no_rows(self):
        with self.assertRaises(FormatError):
            read_series(self.write_text("#a,,0,1\na\n"))

    def test_climate_needs_outdoor_temperature(self):
        path = write_series(self.dir / "c.csv", [TimeSeries("Qsolar_W", "W", 0.0, 3600.0, [0.0, 1.0])])
        with self.assertRaises(FormatError) as caught:
            read_climate(path)
        self.assertEqual(caught.exception.column, "To_C")

    def test_climate_round_trip(self):
        climate = synth_climate(2, days=2)
        loaded = read_climate(write_climate(self.dir / "climate.csv", climate))
        self.assertEqual(loaded.outdoor_temperature, climate.outdoor_temperature)
        self.assertEqual(loaded.irradiance, climate.irradiance)

    def test_result_round_trip(self):
        result = ReferenceSimulator(load_building()).simulate(synth_climate(1, days=2), internal_gains=True)
        loaded = read_result(write_result(self.dir / "simulation.csv", result))
        self.assertEqual(loaded.zone_names, result.zone_names)
        self.assertEqual(loaded.source, "import")
        for zone in result.zone_names:
            self.assertEqual(loaded.temperature(zone), result.temperature(zone))
            self.assertEqual(loaded.zones[zone].internal_gain, result.zones[zone].internal_gain)

    def test_zone_needs_hvac_column(self):
        columns = [TimeSeries(name, "", 0.0, 3600.0, [1.0, 2.0]) for name in ("To_C", "Qsolar_W", "Ti_z_C")]
        with self.assertRaises(FormatError) as caught:
            read_result(write_series(self.dir / "r.csv", columns))
        self.assertEqual(caught.exception.column, "Qhvac_z")


if __name__ == "__main__":
    unittest.main()
