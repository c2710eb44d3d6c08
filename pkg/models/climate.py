"""Outdoor climate driving the reference simulator."""
from typing import List, Optional

import numpy as np

from models.time_series import TimeSeries
from models.building import STANDARD_PRESSURE_PA
from utils.psychrometrics import rh_from_tx, x_from_trh


class Climate:
    """
    Outdoor temperature, solar gain and humidity on one sampling grid.

    Attributes:
        outdoor_temperature (TimeSeries): T_o in degC
        solar_gain (TimeSeries): Q_solar in W, the heat gain a reference room receives
        irradiance (TimeSeries or None): W/m2, used by zones with a solar aperture
        humidity_ratio (TimeSeries or None): X_o in kg/kg
        relative_humidity (TimeSeries or None): RH_o in %
    """

    def __init__(
        self,
        outdoor_temperature: TimeSeries,
        solar_gain: TimeSeries,
        humidity_ratio: Optional[TimeSeries] = None,
        relative_humidity: Optional[TimeSeries] = None,
        irradiance: Optional[TimeSeries] = None,
        pressure: float = STANDARD_PRESSURE_PA
    ):
        series = [outdoor_temperature, solar_gain, humidity_ratio, relative_humidity, irradiance]
        for other in series[1:]:
            if other is not None and not other.same_grid(outdoor_temperature):
                raise ValueError(f"Climate channel '{other.name}' is not on the T_o grid")

        if relative_humidity is not None and humidity_ratio is None:
            humidity_ratio = relative_humidity.with_values(
                x_from_trh(outdoor_temperature.values, relative_humidity.values, pressure),
                name="Xo_kgkg", unit="kg/kg")
        elif humidity_ratio is not None and relative_humidity is None:
            relative_humidity = humidity_ratio.with_values(
                rh_from_tx(outdoor_temperature.values, humidity_ratio.values, pressure),
                name="RHo_pct", unit="%")

        if relative_humidity is not None:
            rh = relative_humidity.values
            if np.any(rh < 0) or np.any(rh > 100):
                raise ValueError("Outdoor relative humidity must lie in [0, 100]")
        if humidity_ratio is not None and np.any(humidity_ratio.values < 0):
            raise ValueError("Outdoor humidity ratio must be non-negative")

        self.outdoor_temperature = outdoor_temperature
        self.solar_gain = solar_gain
        self.humidity_ratio = humidity_ratio
        self.relative_humidity = relative_humidity
        self.irradiance = irradiance
        self.pressure = float(pressure)

    @property
    def t0(self) -> float:
        return self.outdoor_temperature.t0

    @property
    def dt(self) -> float:
        return self.outdoor_temperature.dt

    def __len__(self) -> int:
        return len(self.outdoor_temperature)

    @property
    def has_humidity(self) -> bool:
        return self.humidity_ratio is not None

    def channels(self) -> List[TimeSeries]:
        """All present channels in column order."""
        return [s for s in (self.outdoor_temperature, self.solar_gain, self.irradiance,
                            self.humidity_ratio, self.relative_humidity) if s is not None]

    def _map(self, func) -> "Climate":
        def apply(series):
            return None if series is None else func(series)

        return Climate(apply(self.outdoor_temperature), apply(self.solar_gain),
                       humidity_ratio=apply(self.humidity_ratio),
                       relative_humidity=apply(self.relative_humidity),
                       irradiance=apply(self.irradiance), pressure=self.pressure)

    def slice(self, start: int, stop: int) -> "Climate":
        return self._map(lambda s: s.slice(start, stop))

    def resample(self, dt: float) -> "Climate":
        """
        Zero-order-hold onto a finer grid, or decimate onto a coarser one.

        Raises:
            ValueError: If the two periods are not integer multiples
        """
        from services.signal_service import resample_hold
        if dt == self.dt:
            return self
        return self._map(lambda s: resample_hold(s, dt))
