"""
On/off control and closed-loop simulation of identified models.

Input layout of a thermal model: [T_o, Q_solar, (Q_internal)] followed by Q_hvac
when the HVAC power is a separate input. Heat-and-moisture models append
[X_o, moisture actuation + vapour production] and output [T_i, X_i].
"""
import logging
import math
import time
from typing import Dict, Optional, Tuple, Union

import numpy as np

from models.building import HvacConfig
from models.climate import Climate
from models.control import LoopTopology, OnOffSetpoints
from models.output_error_model import OutputErrorModel
from models.sim_result import SimResult, ZoneTrace, saturation_warning, zone_series
from models.state_space_model import StateSpaceModel
from models.time_series import TimeSeries
from services.identification_service import DtMismatch, to_state_space
from utils.psychrometrics import rh_from_tx

logger = logging.getLogger(__name__)

STABLE_RANGE_DEGC = (-50.0, 100.0)


class TopologyMismatch(Exception):
    """Raised when a loop topology does not fit the model's inputs or outputs."""
    pass


class UnstableLoop(Exception):
    """Raised when the closed-loop state stops being finite; no samples past it are produced."""

    def __init__(self, step: int, message: str):
        super().__init__(message)
        self.step = step


def controller_step(setpoints: OnOffSetpoints, hvac: HvacConfig, temperature: float,
                    relative_humidity: Optional[float] = None) -> Tuple[float, float]:
    """
    One decision of the thermostat and, with humidity set points, the humidistat.

    Returns:
        (Q in W, heating positive; moisture actuation in kg/s, humidification positive)
    """
    if not math.isfinite(temperature):
        raise ValueError(f"Measured temperature must be finite, got {temperature}")
    if temperature < setpoints.heating:
        power = hvac.heating_capacity
    elif temperature > setpoints.cooling:
        power = -hvac.cooling_capacity
    else:
        power = 0.0

    moisture = 0.0
    if setpoints.has_humidity and relative_humidity is not None:
        if relative_humidity < setpoints.humidify:
            moisture = hvac.humidification_capacity
        elif relative_humidity > setpoints.dehumidify:
            moisture = -hvac.dehumidification_capacity
    return power, moisture


def expected_inputs(topology: LoopTopology, internal_gain: bool, moisture: bool) -> int:
    return topology.thermal_inputs(3 if internal_gain else 2) + (2 if moisture else 0)


def simulate_closed_loop(
    model: Union[StateSpaceModel, OutputErrorModel],
    climate: Climate,
    setpoints: OnOffSetpoints,
    hvac: HvacConfig,
    topology: LoopTopology = LoopTopology.HVAC_SEPARATE_INPUT,
    zone: str = "zone1",
    dt: Optional[float] = None,
    x0=None,
    solar_gain: Optional[TimeSeries] = None,
    internal_gain: Optional[TimeSeries] = None,
    vapor_production: float = 0.0,
    pressure: Optional[float] = None
) -> SimResult:
    """
    Run an identified model under on/off control.

    Each step reads the model output with the previous actuation as feedthrough,
    decides the actuation, records the output with that actuation and advances the state.
    Leaving the plausible temperature range is only flagged; a non-finite state ends the run.

    Args:
        model: Discrete identified model
        climate: Outdoor conditions; resampled when dt differs from its period
        setpoints: Thermostat (and humidistat) set points
        hvac: Capacities
        topology: How Q_hvac enters the model
        zone: Zone label of the produced traces
        dt: Loop period; defaults to the model's
        x0: Initial state (zero when None)
        solar_gain: Zone solar gain; defaults to the climate's Q_solar
        internal_gain: Internal gain input, for models that take one
        vapor_production: Known vapour production added to the moisture channel (kg/s)
        pressure: Pressure for RH (Pa); defaults to the climate's

    Returns:
        SimResult with one zone, source 'si'

    Raises:
        TopologyMismatch: If the model's input/output count or x0 does not fit the topology
        UnstableLoop: At the first step whose output is not finite, or when the final state is not
        DtMismatch: If the model period differs from the loop period
    """
    started = time.perf_counter()
    if isinstance(model, OutputErrorModel):
        model = to_state_space(model)
    if model.is_continuous:
        raise DtMismatch("Continuous models must be discretized before closing the loop")
    dt = model.dt if dt is None else float(dt)
    if not math.isclose(model.dt, dt, rel_tol=1e-9):
        raise DtMismatch(f"Model dt={model.dt} does not match loop dt={dt}")
    if climate.dt != dt:
        climate = climate.resample(dt)

    moisture = model.n_outputs == 2
    if moisture and not setpoints.has_humidity:
        logger.info("Humidity set points absent: moisture actuation stays at zero")
    if moisture and not climate.has_humidity:
        raise TopologyMismatch("A heat-and-moisture model needs outdoor humidity in the climate")
    if model.n_outputs not in (1, 2):
        raise TopologyMismatch(f"Closed loops support 1 or 2 outputs, model has {model.n_outputs}")
    expected = expected_inputs(topology, internal_gain is not None, moisture)
    if model.n_inputs != expected:
        raise TopologyMismatch(
            f"Topology '{topology.value}' expects {expected} model inputs, model has {model.n_inputs}")

    n = len(climate)
    solar = (solar_gain if solar_gain is not None else climate.solar_gain).values
    internal = internal_gain.values if internal_gain is not None else None
    for label, series in (("solar gain", solar), ("internal gain", internal)):
        if series is not None and len(series) != n:
            raise ValueError(f"Zone {label} has {len(series)} samples, climate has {n}")
    pressure = climate.pressure if pressure is None else pressure

    columns = [climate.outdoor_temperature.values, solar]
    if internal is not None:
        columns.append(internal)
    solar_column = 1
    hvac_column = solar_column if topology is LoopTopology.HVAC_ADDED_TO_SOLAR else len(columns)
    if topology is LoopTopology.HVAC_SEPARATE_INPUT:
        columns.append(np.zeros(n))
    moisture_column = None
    if moisture:
        columns.append(climate.humidity_ratio.values)
        moisture_column = len(columns)
        columns.append(np.full(n, vapor_production))
    exogenous = np.column_stack(columns)

    A, B, C, D = model.A, model.B, model.C, model.D
    order = model.order
    x = np.zeros(order) if x0 is None else np.asarray(x0, dtype=float).ravel().copy()
    if x.size != order:
        raise TopologyMismatch(f"Initial state has {x.size} entries, model order is {order}")
    # one product gives the next state's free part and the outputs; actuation enters
    # through its columns, precomputed per actuation level
    stacked = np.vstack([A, C])
    forced = exogenous @ B.T
    base = exogenous @ D.T
    b_q, d_q = B[:, hvac_column], D[:, hvac_column]
    if moisture_column is not None:
        b_m, d_m = B[:, moisture_column], D[:, moisture_column]
    else:
        b_m, d_m = np.zeros(order), np.zeros(model.n_outputs)
    actuated = {}
    base_t = base[:, 0].tolist()
    base_x = base[:, 1].tolist() if moisture else None
    dq_t, dm_t = float(d_q[0]), float(d_m[0])
    dq_x, dm_x = (float(d_q[1]), float(d_m[1])) if moisture else (0.0, 0.0)
    free = np.empty((n, model.n_outputs))
    q_record = np.zeros(n)
    m_record = np.zeros(n)
    q = m = 0.0
    low, high = STABLE_RANGE_DEGC
    unstable_at = None

    logger.info(f"Closed loop: {model!r}, topology '{topology.value}', set points {setpoints.label()}, {n} steps")
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            product = stacked @ x
            free[k] = product[order:]
            temperature = float(product[order]) + base_t[k] + dq_t * q + dm_t * m
            if not math.isfinite(temperature):
                raise UnstableLoop(k, f"T_i is not finite at step {k}")
            if unstable_at is None and not low <= temperature <= high:
                unstable_at = k
            rh = None
            if moisture:
                humidity = float(product[order + 1]) + base_x[k] + dq_x * q + dm_x * m
                rh = rh_from_tx(temperature, humidity, pressure)
            q, m = controller_step(setpoints, hvac, temperature, rh)
            q_record[k] = q
            m_record[k] = m
            update = actuated.get((q, m))
            if update is None:
                update = actuated[(q, m)] = forced + b_q * q + b_m * m
            x = product[:order] + update[k]
        if n and not np.all(np.isfinite(x)):
            raise UnstableLoop(n - 1, f"State is not finite after step {n - 1}")
        outputs = free + base + np.outer(q_record, d_q) + np.outer(m_record, d_m)

    warnings = []
    if unstable_at is not None:
        message = (f"UnstableLoop: T_i left [{low:g}, {high:g}] degC at step {unstable_at}; "
                   f"the loop was run to completion")
        logger.warning(message)
        warnings.append(message)

    t0 = climate.t0
    trace = {
        "temperature": zone_series("Ti", zone, t0, dt, outputs[:, 0]),
        "hvac_power": zone_series("Qhvac", zone, t0, dt, q_record),
        "solar_gain": zone_series("Qsol", zone, t0, dt, solar),
    }
    if internal is not None:
        trace["internal_gain"] = zone_series("Qint", zone, t0, dt, internal)
    if moisture:
        trace["humidity_ratio"] = zone_series("Xi", zone, t0, dt, outputs[:, 1])
        trace["relative_humidity"] = zone_series(
            "RHi", zone, t0, dt, rh_from_tx(outputs[:, 0], np.maximum(outputs[:, 1], 0.0), pressure))
        trace["moisture_actuation"] = zone_series("Mhvac", zone, t0, dt, m_record)
        trace["moisture_source"] = zone_series("Gvap", zone, t0, dt, np.full(n, vapor_production))
        saturated = saturation_warning(zone, outputs[:, 0], outputs[:, 1], pressure)
        if saturated:
            logger.warning(saturated)
            warnings.append(saturated)

    runtime = max(time.perf_counter() - started, 1e-9)
    return SimResult({zone: ZoneTrace(**trace)}, climate=climate, pressure=pressure,
                     runtime_s=runtime, warnings=warnings, source="si")


def within_band_fraction(result: SimResult, setpoints: OnOffSetpoints,
                         tolerance: float = 0.0) -> Dict[str, float]:
    """Percentage of samples with T_h - tol <= T_i <= T_c + tol, per zone and 'aggregate'."""
    fractions = {}
    inside_total = 0
    count_total = 0
    for name in result.zone_names:
        t = result.temperature(name).values
        inside = int(np.count_nonzero((t >= setpoints.heating - tolerance)
                                      & (t <= setpoints.cooling + tolerance)))
        fractions[name] = 100.0 * inside / t.size
        inside_total += inside
        count_total += t.size
    fractions["aggregate"] = 100.0 * inside_total / count_total
    return fractions


def switching_rate(result: SimResult, zone: str) -> float:
    """HVAC actuation changes per hour of simulated time."""
    power = result.hvac_power(zone)
    switches = np.count_nonzero(np.diff(power.values) != 0)
    hours = len(power) * power.dt / 3600.0
    return float(switches / hours)
