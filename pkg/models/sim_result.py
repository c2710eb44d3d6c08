"""Simulation results shared by the reference simulator and the closed-loop SI runs."""
from typing import Dict, List, Optional

import numpy as np

from models.time_series import TimeSeries
from models.building import STANDARD_PRESSURE_PA
from utils.psychrometrics import is_saturated

# kind -> (column suffix, unit)
ZONE_CHANNELS = {
    "Ti": ("C", "degC"),
    "Qhvac": ("W", "W"),
    "Qsol": ("W", "W"),
    "Qint": ("W", "W"),
    "Xi": ("kgkg", "kg/kg"),
    "RHi": ("pct", "%"),
    "Mhvac": ("kgs", "kg/s"),
    "Gvap": ("kgs", "kg/s"),
}


def zone_series(kind: str, zone: str, t0: float, dt: float, values) -> TimeSeries:
    """Series named by the CSV convention '<kind>_<zone>_<suffix>'."""
    suffix, unit = ZONE_CHANNELS[kind]
    return TimeSeries(f"{kind}_{zone}_{suffix}", unit, t0, dt, values)


def saturation_warning(zone: str, temperature, humidity_ratio, pressure: float) -> Optional[str]:
    """Warning text when a zone's air is supersaturated on some samples, else None."""
    count = int(np.count_nonzero(is_saturated(temperature, humidity_ratio, pressure)))
    if not count:
        return None
    return f"Saturation: RH of zone '{zone}' above 100 % on {count} sample(s), recorded clamped at 100"


def parse_zone_column(name: str):
    """Split a zone column name into (kind, zone), or None if it is not one."""
    kind, _, rest = name.partition("_")
    if kind not in ZONE_CHANNELS:
        return None
    zone, _, suffix = rest.rpartition("_")
    if not zone or suffix != ZONE_CHANNELS[kind][0]:
        return None
    return kind, zone


class ZoneTrace:
    """
    Recorded series of one zone.

    Attributes:
        temperature (TimeSeries): T_i in degC
        hvac_power (TimeSeries): Q_hvac in W, heating positive
        solar_gain (TimeSeries or None): Solar heat reaching the zone (W)
        internal_gain (TimeSeries or None): Internal heat gains (W)
        humidity_ratio (TimeSeries or None): X_i in kg/kg
        relative_humidity (TimeSeries or None): RH_i in %
        moisture_actuation (TimeSeries or None): (de)humidification in kg/s, humidification positive
        moisture_source (TimeSeries or None): Internal vapour production in kg/s
    """

    def __init__(
        self,
        temperature: TimeSeries,
        hvac_power: TimeSeries,
        solar_gain: Optional[TimeSeries] = None,
        internal_gain: Optional[TimeSeries] = None,
        humidity_ratio: Optional[TimeSeries] = None,
        relative_humidity: Optional[TimeSeries] = None,
        moisture_actuation: Optional[TimeSeries] = None,
        moisture_source: Optional[TimeSeries] = None
    ):
        for other in (hvac_power, solar_gain, internal_gain, humidity_ratio,
                      relative_humidity, moisture_actuation, moisture_source):
            if other is not None and not other.same_grid(temperature):
                raise ValueError(f"Zone channel '{other.name}' is not on the T_i grid")
        self.temperature = temperature
        self.hvac_power = hvac_power
        self.solar_gain = solar_gain
        self.internal_gain = internal_gain
        self.humidity_ratio = humidity_ratio
        self.relative_humidity = relative_humidity
        self.moisture_actuation = moisture_actuation
        self.moisture_source = moisture_source

    def slice(self, start: int, stop: int) -> "ZoneTrace":
        def cut(series):
            return None if series is None else series.slice(start, stop)

        return ZoneTrace(cut(self.temperature), cut(self.hvac_power), cut(self.solar_gain),
                         cut(self.internal_gain), cut(self.humidity_ratio),
                         cut(self.relative_humidity), cut(self.moisture_actuation),
                         cut(self.moisture_source))

    def channels(self) -> List[TimeSeries]:
        return [s for s in (self.temperature, self.hvac_power, self.solar_gain,
                            self.internal_gain, self.humidity_ratio, self.relative_humidity,
                            self.moisture_actuation, self.moisture_source) if s is not None]


class SimResult:
    """
    Per-zone traces on the grid of the driving climate.

    Attributes:
        zones (dict): Zone name -> ZoneTrace, in column order
        climate: The Climate that drove the run (None for imported data)
        pressure (float): Pressure used for RH (Pa)
        runtime_s (float): Wall-clock seconds spent simulating
        warnings (list): Non-fatal findings (unstable loop, humidity clamps, ...)
        source (str): 'reference', 'si' or 'import'
    """

    def __init__(self, zones: Dict[str, ZoneTrace], climate=None,
                 pressure: float = STANDARD_PRESSURE_PA, runtime_s: float = 0.0,
                 warnings: Optional[List[str]] = None, source: str = "reference"):
        if not zones:
            raise ValueError("A simulation result needs at least one zone")
        first = next(iter(zones.values())).temperature
        for name, trace in zones.items():
            if not trace.temperature.same_grid(first):
                raise ValueError(f"Zone '{name}' is not on the shared grid")
        self.zones = dict(zones)
        self.climate = climate
        self.pressure = float(pressure)
        self.runtime_s = float(runtime_s)
        self.warnings = list(warnings or [])
        self.source = source

    @property
    def zone_names(self) -> List[str]:
        return list(self.zones)

    @property
    def t0(self) -> float:
        return self._first().t0

    @property
    def dt(self) -> float:
        return self._first().dt

    def __len__(self) -> int:
        return len(self._first())

    def _first(self) -> TimeSeries:
        return next(iter(self.zones.values())).temperature

    def same_grid(self, other: "SimResult") -> bool:
        return self._first().same_grid(other._first())

    def temperature(self, zone: str) -> TimeSeries:
        return self.zones[zone].temperature

    def hvac_power(self, zone: str) -> TimeSeries:
        return self.zones[zone].hvac_power

    def temperature_matrix(self, zones: Optional[List[str]] = None) -> np.ndarray:
        """Samples x zones array of indoor temperatures."""
        names = zones or self.zone_names
        return np.column_stack([self.zones[name].temperature.values for name in names])

    def channels(self) -> List[TimeSeries]:
        """Every recorded series, climate first, in CSV column order."""
        series = list(self.climate.channels()) if self.climate is not None else []
        for trace in self.zones.values():
            series.extend(trace.channels())
        return series

    def slice(self, start: int, stop: int) -> "SimResult":
        """Samples [start, stop) of every zone and of the climate."""
        climate = self.climate.slice(start, stop) if self.climate is not None else None
        return SimResult({name: trace.slice(start, stop) for name, trace in self.zones.items()},
                         climate=climate, pressure=self.pressure, runtime_s=self.runtime_s,
                         warnings=self.warnings, source=self.source)
