"""
Reference multi-zone RC simulator: the "truth" data the identified models are
judged against, plus the synthetic climate that drives it.

Nodes are advanced by explicit Euler sub-steps no longer than a fixed fraction
of the fastest network time constant and never longer than MAX_SUBSTEP_S, so
runs at different output periods integrate on the same fine grid. Climate
inputs and actuation are held constant over each output step; the controller decides once per output step
on the sampled indoor state before that step is advanced.
"""
import logging
import math
import time
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.signal import lfilter

from models.building import STANDARD_PRESSURE_PA, Building, HvacConfig
from models.climate import Climate
from models.control import FREE_FLOAT, OnOffController
from models.sim_result import SimResult, ZoneTrace, saturation_warning, zone_series
from models.time_series import TimeSeries
from services.control_service import controller_step
from utils.psychrometrics import rh_from_tx, x_from_trh

logger = logging.getLogger(__name__)

SUBSTEP_FRACTION = 0.05
MAX_SUBSTEP_S = 60.0
SECONDS_PER_DAY = 86400.0
ANNUAL_MEAN_DEGC = 14.0
ANNUAL_SWING_DEGC = 8.0
HEAT_WAVE_DEGC = 7.0


class InstabilityDetected(Exception):
    """Raised when a simulated state becomes non-finite."""
    pass


class ReferenceSimulator:
    """
    Simulates a Building under a Climate, free-floating or on/off controlled.

    Attributes:
        building (Building): The simulated building
        substep_fraction (float): Sub-step as a fraction of the fastest time constant
        max_substep (float): Upper bound of the sub-step in seconds
    """

    def __init__(self, building: Building, substep_fraction: float = SUBSTEP_FRACTION,
                 max_substep: float = MAX_SUBSTEP_S):
        if not 0 < substep_fraction <= 0.1:
            raise ValueError("Sub-step fraction must lie in (0, 0.1]")
        if not max_substep > 0:
            raise ValueError("Maximum sub-step must be positive")
        self.building = building
        self.substep_fraction = substep_fraction
        self.max_substep = float(max_substep)
        self.thermal = building.thermal_network()
        self.moisture = building.moisture_network()

    def substeps(self, dt: float, moisture: bool = False) -> int:
        """Number of explicit sub-steps per output step of length dt."""
        tau = self.thermal.fastest_time_constant()
        if moisture:
            tau = min(tau, self.moisture.fastest_time_constant())
        longest = min(self.substep_fraction * tau, self.max_substep)
        return max(1, int(math.ceil(dt / longest)))

    def overshoot_bound(self, dt: float, hvac: Optional[HvacConfig] = None) -> Dict[str, float]:
        """Per-zone temperature overshoot bound Q_max * dt / C_air of one held control step."""
        hvac = hvac or self.building.hvac
        q_max = max(hvac.heating_capacity, hvac.cooling_capacity)
        return {zone.name: q_max * dt / zone.air_capacitance for zone in self.building.zones}

    def simulate(self, climate: Climate, controller: Optional[OnOffController] = FREE_FLOAT,
                 hvac: Optional[HvacConfig] = None, dt_output: Optional[float] = None,
                 x0=None, internal_gains: bool = False) -> SimResult:
        """
        Thermal simulation.

        Args:
            climate: Outdoor conditions, resampled to dt_output when that differs
            controller: OnOffController, or FREE_FLOAT
            hvac: Capacities; defaults to the building's
            dt_output: Output (and control) period; defaults to climate.dt
            x0: Initial node temperatures, a scalar for all nodes, or None for the building default
            internal_gains: Inject the scheduled occupancy gains

        Returns:
            SimResult on the output grid

        Raises:
            InstabilityDetected: If a state becomes non-finite
        """
        return self._run(climate, controller, hvac, dt_output, x0, internal_gains, moisture=False)

    def simulate_ham(self, climate: Climate, controller: Optional[OnOffController] = FREE_FLOAT,
                     hvac: Optional[HvacConfig] = None, dt_output: Optional[float] = None,
                     x0=None, internal_gains: bool = False) -> SimResult:
        """Coupled heat and moisture simulation; the climate must carry humidity."""
        if not climate.has_humidity:
            raise ValueError("Heat-and-moisture simulation needs outdoor humidity in the climate")
        return self._run(climate, controller, hvac, dt_output, x0, internal_gains, moisture=True)

    def _initial_state(self, x0) -> np.ndarray:
        size = self.thermal.size
        if x0 is None:
            return np.full(size, self.building.initial_temperature)
        x = np.asarray(x0, dtype=float).ravel()
        if x.size == 1:
            return np.full(size, float(x[0]))
        if x.size != size:
            raise ValueError(f"Initial state has {x.size} entries, the network has {size} nodes")
        return x.copy()

    def _zone_gains(self, climate: Climate, internal_gains: bool) -> Tuple[np.ndarray, np.ndarray]:
        """Samples x zones arrays of solar and internal heat gains (W)."""
        n = len(climate)
        hours = ((climate.t0 + climate.dt * np.arange(n)) % SECONDS_PER_DAY) / 3600.0
        solar = np.empty((n, len(self.building.zones)))
        internal = np.zeros_like(solar)
        for j, zone in enumerate(self.building.zones):
            if zone.solar_aperture is not None and climate.irradiance is not None:
                solar[:, j] = zone.solar_aperture * climate.irradiance.values
            else:
                solar[:, j] = climate.solar_gain.values
            if internal_gains and zone.internal_gain:
                start, end = zone.occupancy_hours
                internal[:, j] = np.where((hours >= start) & (hours < end), zone.internal_gain, 0.0)
        return solar, internal

    def _run(self, climate: Climate, controller, hvac, dt_output, x0, internal_gains,
             moisture: bool) -> SimResult:
        started = time.perf_counter()
        building = self.building
        hvac = hvac or building.hvac
        if dt_output is not None and dt_output != climate.dt:
            climate = climate.resample(dt_output)
        dt = climate.dt
        n = len(climate)
        zones = building.zones
        names = building.zone_names
        air = np.array([self.thermal.air_index[name] for name in names])

        solar, internal = self._zone_gains(climate, internal_gains)
        injection = np.zeros((len(zones), self.thermal.size))
        mass_injection = np.zeros_like(injection)
        for j, zone in enumerate(zones):
            injection[j, air[j]] = self.thermal.inverse_capacitance[air[j]]
            if zone.has_mass and zone.solar_to_mass > 0:
                mass = self.thermal.mass_index[zone.name]
                mass_injection[j, mass] = zone.solar_to_mass * self.thermal.inverse_capacitance[mass]
                mass_injection[j, air[j]] = (1 - zone.solar_to_mass) * self.thermal.inverse_capacitance[air[j]]
            else:
                mass_injection[j] = injection[j]

        steps = self.substeps(dt, moisture)
        h = dt / steps
        Ah = np.eye(self.thermal.size) + h * self.thermal.A
        outdoor = climate.outdoor_temperature.values
        x = self._initial_state(x0)

        temperature = np.empty((n, len(zones)))
        q_record = np.zeros((n, len(zones)))
        warnings = []

        if moisture:
            wet = self.moisture
            wet_air = np.array([wet.air_index[name] for name in names])
            Mh = np.eye(wet.size) + h * wet.A
            wet_injection = np.zeros((len(zones), wet.size))
            wet_injection[np.arange(len(zones)), wet_air] = wet.inverse_capacitance[wet_air]
            outdoor_x = climate.humidity_ratio.values
            production = np.array([zone.vapor_production for zone in zones])
            start_x = building.initial_humidity if building.initial_humidity is not None else outdoor_x[0]
            w = np.full(wet.size, float(start_x))
            humidity = np.empty((n, len(zones)))
            m_record = np.zeros((n, len(zones)))
            clamped = 0

        logger.info(f"Reference simulation of '{building.name}': {n} steps of {dt:g} s, "
                    f"{steps} sub-steps each, {'free-floating' if controller is None else controller}")

        q = np.zeros(len(zones))
        m_act = np.zeros(len(zones))
        for k in range(n):
            t_air = x[air]
            temperature[k] = t_air
            if moisture:
                x_air = w[wet_air]
                humidity[k] = x_air
            if controller is not None:
                for j in range(len(zones)):
                    rh = rh_from_tx(t_air[j], x_air[j], building.pressure) if moisture else None
                    q[j], m_act[j] = controller_step(controller.setpoints, hvac, t_air[j], rh)
                q_record[k] = q
                if moisture:
                    m_record[k] = m_act

            source = (self.thermal.ambient_gain * outdoor[k]
                      + (q + internal[k]) @ injection + solar[k] @ mass_injection)
            hs = h * source
            for _ in range(steps):
                x = Ah @ x + hs
            if not np.all(np.isfinite(x)):
                raise InstabilityDetected(f"Non-finite temperature after step {k} (sub-step {h:g} s)")

            if moisture:
                ws = h * (wet.ambient_gain * outdoor_x[k] + (production + m_act) @ wet_injection)
                for _ in range(steps):
                    w = Mh @ w + ws
                if not np.all(np.isfinite(w)):
                    raise InstabilityDetected(f"Non-finite humidity after step {k}")
                if np.any(w < 0):
                    clamped += 1
                    w = np.maximum(w, 0.0)

        if moisture and clamped:
            message = f"NegativeHumidity: humidity ratio clamped at 0 on {clamped} step(s)"
            logger.warning(message)
            warnings.append(message)

        t0 = climate.t0
        traces = {}
        for j, zone in enumerate(zones):
            trace = {
                "temperature": zone_series("Ti", zone.name, t0, dt, temperature[:, j]),
                "hvac_power": zone_series("Qhvac", zone.name, t0, dt, q_record[:, j]),
                "solar_gain": zone_series("Qsol", zone.name, t0, dt, solar[:, j]),
            }
            if internal_gains:
                trace["internal_gain"] = zone_series("Qint", zone.name, t0, dt, internal[:, j])
            if moisture:
                saturated = saturation_warning(zone.name, temperature[:, j], humidity[:, j], building.pressure)
                if saturated:
                    logger.warning(saturated)
                    warnings.append(saturated)
                trace["humidity_ratio"] = zone_series("Xi", zone.name, t0, dt, humidity[:, j])
                trace["relative_humidity"] = zone_series(
                    "RHi", zone.name, t0, dt, rh_from_tx(temperature[:, j], humidity[:, j], building.pressure))
                trace["moisture_actuation"] = zone_series("Mhvac", zone.name, t0, dt, m_record[:, j])
                trace["moisture_source"] = zone_series("Gvap", zone.name, t0, dt,
                                                       np.full(n, zone.vapor_production))
            traces[zone.name] = ZoneTrace(**trace)

        runtime = max(time.perf_counter() - started, 1e-9)
        logger.info(f"Reference simulation finished in {runtime:.3f} s")
        return SimResult(traces, climate=climate, pressure=building.pressure, runtime_s=runtime,
                         warnings=warnings, source="reference")


def annual_energy(result: SimResult) -> Dict[str, Tuple[float, float]]:
    """
    Heating and cooling energy per zone.

    Returns:
        Zone -> (heating J, cooling J), each the sum of max(+-Q, 0) * dt
    """
    energy = {}
    for name, trace in result.zones.items():
        q = trace.hvac_power.values
        dt = trace.hvac_power.dt
        energy[name] = (float(np.sum(np.maximum(q, 0.0)) * dt),
                        float(np.sum(np.maximum(-q, 0.0)) * dt))
    return energy


def total_energy(result: SimResult) -> float:
    """Heating plus cooling energy over all zones (J)."""
    return sum(heating + cooling for heating, cooling in annual_energy(result).values())


def synth_climate(seed: int, start: str = "2021-01-01", days: int = 365, dt: float = 3600.0,
                  heat_wave: bool = True, pressure: float = STANDARD_PRESSURE_PA) -> Climate:
    """
    Deterministic synthetic climate.

    T_o is an annual cosine (coldest mid-January) plus a diurnal cosine (coldest
    around 04:00) plus seeded AR(1) noise. Irradiance is a half-rectified diurnal
    sine under a seasonal envelope, scaled by a seeded daily cloudiness; it is zero
    at night, midnight included. A heat wave in mid-June lifts T_o for five clear
    days. Relative humidity is bounded and X_o follows from it.

    Args:
        seed: Seed of every random component (same seed -> bit-identical climate)
        start: Calendar date of the first sample, midnight UTC
        days: Number of days (>= 1)
        dt: Sample period (s), dividing a day
        heat_wave: Include the June heat-wave episode
        pressure: Atmospheric pressure (Pa)
    """
    if days < 1:
        raise ValueError("A synthetic climate needs at least one day")
    per_day = SECONDS_PER_DAY / dt
    if abs(per_day - round(per_day)) > 1e-9:
        raise ValueError(f"Sample period {dt} s must divide a day")
    n = int(round(days * per_day))

    index = pd.date_range(pd.Timestamp(start, tz="UTC"), periods=n,
                          freq=pd.Timedelta(seconds=dt))
    t0 = index[0].timestamp()
    hour = (index.hour + index.minute / 60.0 + index.second / 3600.0).to_numpy(dtype=float)
    doy = index.dayofyear.to_numpy(dtype=float) + hour / 24.0
    day_number = ((index - index[0]) // pd.Timedelta(days=1)).to_numpy()

    rng = np.random.default_rng(seed)
    phi = math.exp(-dt / (1.5 * SECONDS_PER_DAY))
    noise = lfilter([2.0 * math.sqrt(1 - phi * phi)], [1.0, -phi], rng.normal(size=n))
    cloudiness = rng.uniform(0.3, 1.0, size=days + 1)[day_number]
    humidity_noise = lfilter([6.0 * math.sqrt(1 - phi * phi)], [1.0, -phi], rng.normal(size=n))

    annual = ANNUAL_MEAN_DEGC - ANNUAL_SWING_DEGC * np.cos(2 * np.pi * (doy - 15.0) / 365.25)
    diurnal = -4.5 * np.cos(2 * np.pi * (hour - 4.0) / 24.0)
    outdoor = annual + diurnal + noise

    if heat_wave:
        episode = np.clip(3.5 - np.abs(doy - 165.5), 0.0, 1.0)
        episode = np.sin(0.5 * np.pi * episode) ** 2
        outdoor = outdoor + HEAT_WAVE_DEGC * episode
        cloudiness = np.where(episode > 0, 1.0, cloudiness)

    envelope = 500.0 + 300.0 * np.cos(2 * np.pi * (doy - 172.0) / 365.25)
    irradiance = envelope * np.maximum(0.0, np.sin(2 * np.pi * (hour - 6.0) / 24.0)) * cloudiness

    relative = np.clip(75.0 + 10.0 * np.cos(2 * np.pi * (hour - 4.0) / 24.0)
                       + 5.0 * np.cos(2 * np.pi * (doy - 15.0) / 365.25) + humidity_noise,
                       25.0, 98.0)

    def series(name, unit, values):
        return TimeSeries(name, unit, t0, dt, values)

    logger.info(f"Synthetic climate: seed {seed}, {days} days from {start}, dt {dt:g} s")
    return Climate(
        series("To_C", "degC", outdoor),
        series("Qsolar_W", "W", irradiance * 1.0),
        humidity_ratio=series("Xo_kgkg", "kg/kg", x_from_trh(outdoor, relative, pressure)),
        relative_humidity=series("RHo_pct", "%", relative),
        irradiance=series("Isolar_Wm2", "W/m2", irradiance),
        pressure=pressure,
    )
