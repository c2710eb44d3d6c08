"""
Case-study pipelines: identify a model from reference data, apply it, compare
it against the reference and decide whether the application is supported.

Every generated case uses two synthetic years. Year A (seed) provides the
identification data, split in halves for estimation and validation. Year B
(seed + 1) is the application year.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from models.control import FREE_FLOAT, LoopTopology, OnOffController, OnOffSetpoints
from models.identification import FitReport
from models.reports import CASE_IDS, CaseVerdict, GateResult, Limitation, SweepRow
from models.run_config import CaseConfig
from models.sim_result import SimResult, ZoneTrace, zone_series
from models.state_space_model import StateSpaceModel
from models.time_series import TimeSeries
from services.control_service import (
    TopologyMismatch,
    UnstableLoop,
    simulate_closed_loop,
    switching_rate,
    within_band_fraction,
)
from services.identification_service import (
    IdentificationError,
    estimate_initial_state,
    estimate_subspace,
    resample_model,
    resample_state,
    simulate_array,
    validate,
)
from services.reference_simulator import SECONDS_PER_DAY, InstabilityDetected, ReferenceSimulator, synth_climate
from services.signal_service import ZeroPowerSignal, add_noise, crest_factor, split_halves
from services.validation_service import CREST_LIMIT, GridMismatch, accuracy_gate, compare, timing_report
from utils.building_config import load_building
from utils.csv_io import FormatError, read_result
from utils.psychrometrics import rh_from_tx

logger = logging.getLogger(__name__)

PIPELINE_ERRORS = (
    IdentificationError,
    GridMismatch,
    ZeroPowerSignal,
    TopologyMismatch,
    UnstableLoop,
    InstabilityDetected,
    FormatError,
    np.linalg.LinAlgError,
    ValueError,
)

SEPARATE = LoopTopology.HVAC_SEPARATE_INPUT
ADDED = LoopTopology.HVAC_ADDED_TO_SOLAR


def describe_error(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def model_signals(result: SimResult, zone: str, topology: Optional[LoopTopology],
                  internal_gain: bool = False,
                  moisture: bool = False) -> Tuple[List[TimeSeries], List[TimeSeries]]:
    """
    Model inputs and outputs of one zone, in the layout closed loops expect.

    Args:
        result: Simulated or imported run carrying its climate
        zone: Zone whose T_i (and X_i) are the outputs
        topology: How Q_hvac enters; None leaves it out (free-floating data)
        internal_gain: Include the internal-gain input
        moisture: Append [X_o, moisture actuation + vapour production] and output X_i

    Raises:
        ValueError: If the run lacks a channel the layout needs
    """
    if result.climate is None:
        raise ValueError("Identification data needs the climate that drove the run")
    if zone not in result.zones:
        raise ValueError(f"Zone '{zone}' not in {result.zone_names}")
    climate = result.climate
    trace = result.zones[zone]
    solar = trace.solar_gain if trace.solar_gain is not None else climate.solar_gain
    inputs = [climate.outdoor_temperature, solar]
    if internal_gain:
        if trace.internal_gain is None:
            raise ValueError(f"Zone '{zone}' has no internal-gain channel")
        inputs.append(trace.internal_gain)

    if topology is ADDED:
        inputs[1] = solar.with_values(solar.values + trace.hvac_power.values,
                                      name=f"Qsol+Qhvac_{zone}_W")
    elif topology is SEPARATE:
        inputs.append(trace.hvac_power)

    outputs = [trace.temperature]
    if moisture:
        if not climate.has_humidity or trace.humidity_ratio is None:
            raise ValueError("Heat-and-moisture identification needs X_o and X_i")
        n = len(result)
        actuation = trace.moisture_actuation.values if trace.moisture_actuation is not None else np.zeros(n)
        source = trace.moisture_source.values if trace.moisture_source is not None else np.zeros(n)
        inputs.append(climate.humidity_ratio)
        inputs.append(trace.temperature.with_values(actuation + source, name=f"Mhvac+Gvap_{zone}_kgs",
                                                    unit="kg/s"))
        outputs.append(trace.humidity_ratio)
    return inputs, outputs


def _columns(series: Sequence[TimeSeries]) -> np.ndarray:
    return np.column_stack([s.values for s in series])


def hvac_excited(result: SimResult, zone: str) -> bool:
    """Whether the HVAC power of a zone varies at all in the run."""
    try:
        crest_factor(result.hvac_power(zone))
    except ZeroPowerSignal:
        return False
    return True


class IdentifiedCase:
    """
    A model identified on the first half of a run and validated on the second.

    Attributes:
        model (StateSpaceModel): The identified model
        crest_ti (float or None): Centered crest factor of the estimation T_i (None: no excitation)
        validation (FitReport): T_i error on the held-out half
        topology (LoopTopology or None): HVAC input layout of the model
        hvac_excited (bool): Whether the identification run had any HVAC actuation, whatever the topology
    """

    def __init__(self, model: StateSpaceModel, crest_ti: Optional[float], validation: FitReport,
                 topology: Optional[LoopTopology], hvac_excited: bool):
        self.model = model
        self.crest_ti = crest_ti
        self.validation = validation
        self.topology = topology
        self.hvac_excited = hvac_excited

    @property
    def mu_e_I(self) -> float:
        return self.validation.mu_e

    def gate(self) -> GateResult:
        return accuracy_gate(self.crest_ti, self.mu_e_I)

    def details(self) -> Dict[str, object]:
        eigenvalues = self.model.eigenvalues()
        return {
            "order": self.model.order,
            "topology": self.topology.value if self.topology is not None else "free-float",
            "validation": self.validation.to_dict(),
            "max_abs_eigenvalue": float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0,
            "model_warnings": list(self.model.warnings),
        }


class CaseStudyService:
    """
    Runs the case studies and the identification set-point sweep.

    Reference runs, climates and identified models are cached per service, so
    cases sharing a dataset simulate it once.
    """

    def __init__(self, config: Optional[CaseConfig] = None):
        self.config = config or CaseConfig()
        self.building = self.config.building or load_building()
        if self.config.zone not in self.building.zone_names:
            raise ValueError(f"Zone '{self.config.zone}' not in building zones {self.building.zone_names}")
        self.simulator = ReferenceSimulator(self.building)
        self._climates: Dict[int, object] = {}
        self._runs: Dict[tuple, SimResult] = {}
        self._identified: Dict[tuple, IdentifiedCase] = {}

    # ------------------------------------------------------------------
    # Data
    # ------------------------------------------------------------------

    def climate(self, seed: int):
        if seed not in self._climates:
            self._climates[seed] = synth_climate(seed, start=self.config.start, days=self.config.days,
                                                 dt=self.config.dt, pressure=self.building.pressure)
        return self._climates[seed]

    def reference_run(self, seed: int, setpoints: Optional[OnOffSetpoints] = None,
                      ham: bool = False, internal_gains: bool = False) -> SimResult:
        """Reference simulation of one synthetic year, free-floating when setpoints is None."""
        key = (seed, setpoints.label() if setpoints else None, ham, internal_gains)
        if key not in self._runs:
            controller = OnOffController(setpoints) if setpoints is not None else FREE_FLOAT
            climate = self.climate(seed)
            if ham:
                run = self.simulator.simulate_ham(climate, controller, internal_gains=internal_gains)
            else:
                run = self.simulator.simulate(climate, controller, internal_gains=internal_gains)
            self._runs[key] = run
        return self._runs[key]

    # ------------------------------------------------------------------
    # Identify and apply
    # ------------------------------------------------------------------

    def identify(self, run: SimResult, order: int, topology: Optional[LoopTopology],
                 moisture: bool = False, internal_gain: bool = False,
                 zone: Optional[str] = None, noise_seed: int = 0) -> IdentifiedCase:
        """
        Estimate on the first half of a run and validate on the second.

        Measurement noise of CaseConfig.sensor_noise is added to the estimation T_i
        only; validation runs against the clean second half.

        Raises:
            IdentificationError: If the estimator fails
        """
        zone = zone or self.config.zone
        inputs, outputs = model_signals(run, zone, topology, internal_gain, moisture)
        est_in, val_in = zip(*(split_halves(s) for s in inputs))
        est_out, val_out = zip(*(split_halves(s) for s in outputs))
        est_out = list(est_out)
        if self.config.sensor_noise > 0:
            est_out[0] = add_noise(est_out[0], self.config.sensor_noise, noise_seed)
        try:
            crest = crest_factor(est_out[0])
        except ZeroPowerSignal as exc:
            logger.warning(f"Identification T_i of zone '{zone}': {exc}")
            crest = None

        model = estimate_subspace(list(est_in), est_out, order,
                                  self.config.identification.with_order(order))
        fit = validate(model, list(val_in), list(val_out))
        identified = IdentifiedCase(model, crest, fit, topology, hvac_excited(run, zone))
        logger.info(f"Identified order {order} on zone '{zone}': crest {crest}, mu_e,I {fit.mu_e:.4g} degC")
        return identified

    def identify_generated(self, seed: int, setpoints: Optional[OnOffSetpoints], order: int,
                           topology: Optional[LoopTopology], moisture: bool = False) -> IdentifiedCase:
        """Identify from the year-A reference run, cached per dataset and order."""
        key = (seed, setpoints.label() if setpoints else None, order,
               topology.value if topology else None, moisture)
        if key not in self._identified:
            run = self.reference_run(seed, setpoints, ham=moisture)
            self._identified[key] = self.identify(run, order, topology, moisture=moisture, noise_seed=seed)
        return self._identified[key]

    def initial_state(self, identified: IdentifiedCase, reference: SimResult, zone: str,
                      internal_gain: bool = False, moisture: bool = False) -> np.ndarray:
        """Least-squares model state matching the first samples of a reference run."""
        inputs, outputs = model_signals(reference, zone, identified.topology, internal_gain, moisture)
        return estimate_initial_state(identified.model, _columns(inputs), _columns(outputs))

    def apply_free_float(self, identified: IdentifiedCase, reference: SimResult,
                         zone: Optional[str] = None) -> SimResult:
        """
        Open-loop simulation of a free-float model over a reference run's climate.

        Raises:
            UnstableLoop: If the simulated T_i stops being finite
        """
        zone = zone or self.config.zone
        started = time.perf_counter()
        inputs, outputs = model_signals(reference, zone, None)
        U = _columns(inputs)
        x0 = estimate_initial_state(identified.model, U, _columns(outputs))
        with np.errstate(over="ignore", invalid="ignore"):
            temperature = simulate_array(identified.model, U, x0)[:, 0]
        diverged = np.flatnonzero(~np.isfinite(temperature))
        if diverged.size:
            raise UnstableLoop(int(diverged[0]), f"Free-float T_i is not finite at step {diverged[0]}")
        t0, dt = reference.t0, reference.dt
        trace = ZoneTrace(zone_series("Ti", zone, t0, dt, temperature),
                          zone_series("Qhvac", zone, t0, dt, np.zeros(len(temperature))),
                          solar_gain=reference.zones[zone].solar_gain)
        runtime = max(time.perf_counter() - started, 1e-9)
        return SimResult({zone: trace}, climate=reference.climate, pressure=reference.pressure,
                         runtime_s=runtime, warnings=list(identified.model.warnings), source="si")

    def apply_closed_loop(self, identified: IdentifiedCase, reference: SimResult,
                          setpoints: OnOffSetpoints, topology: LoopTopology = SEPARATE,
                          zone: Optional[str] = None, internal_gain: bool = False,
                          moisture: bool = False, model: Optional[StateSpaceModel] = None,
                          x0: Optional[np.ndarray] = None) -> SimResult:
        """
        Close the loop around an identified model over a reference run's climate.

        The initial state is fitted to the reference run unless x0 is given; model
        overrides the identified model (a re-discretized copy, for instance).
        """
        zone = zone or self.config.zone
        if x0 is None:
            x0 = self.initial_state(identified, reference, zone, internal_gain, moisture)
        trace = reference.zones[zone]
        vapor = self.building.zone(zone).vapor_production if zone in self.building.zone_names else 0.0
        return simulate_closed_loop(
            model if model is not None else identified.model,
            reference.climate, setpoints, self.building.hvac, topology=topology, zone=zone, x0=x0,
            solar_gain=trace.solar_gain,
            internal_gain=trace.internal_gain if internal_gain else None,
            vapor_production=vapor if moisture else 0.0,
            pressure=reference.pressure,
        )

    # ------------------------------------------------------------------
    # Cases
    # ------------------------------------------------------------------

    def run_case(self, case_id: str, seed: int = 0) -> CaseVerdict:
        """
        Run one case study end to end.

        Pipeline errors do not propagate: they are recorded in the verdict, which
        then reports LACKING_TRANSFER_INFO.

        Raises:
            ValueError: If case_id is unknown
        """
        if case_id not in CASE_IDS:
            raise ValueError(f"Unknown case id '{case_id}', expected one of {', '.join(CASE_IDS)}")
        pipelines = {
            "I": self._case_free_float,
            "II": self._case_added_topology,
            "III": self._case_on_off,
            "IV": self._case_fine_step,
            "V": self._case_transfer,
            "HAM": self._case_ham,
            "EXT": self._case_external,
        }
        logger.info(f"Case {case_id}, seed {seed}")
        try:
            verdict = pipelines[case_id](seed)
        except PIPELINE_ERRORS as exc:
            logger.error(f"Case {case_id} failed: {describe_error(exc)}")
            verdict = CaseVerdict(case_id, False, Limitation.LACKING_TRANSFER_INFO,
                                  errors=[describe_error(exc)])
        logger.info(f"Case {case_id}: possible={verdict.possible}, limitation={verdict.limitation.value}")
        return verdict

    def run_cases(self, case_ids: Sequence[str], seed: int = 0, workers: int = 1) -> List[CaseVerdict]:
        """Run several cases, fanning out to worker processes when workers > 1."""
        case_ids = list(case_ids)
        if workers <= 1 or len(case_ids) < 2:
            return [self.run_case(case_id, seed) for case_id in case_ids]
        verdicts: Dict[int, CaseVerdict] = {}
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_case_worker, self.config, case_id, seed): i
                       for i, case_id in enumerate(case_ids)}
            for future in as_completed(futures):
                verdicts[futures[future]] = future.result()
        return [verdicts[i] for i in range(len(case_ids))]

    def _gated_verdict(self, case_id: str, identified: IdentifiedCase, report, details,
                       errors=None) -> CaseVerdict:
        gate = identified.gate()
        details = dict(details, gate=gate.to_dict())
        if gate.passed:
            limitation = Limitation.NONE
        elif identified.crest_ti is None or not identified.crest_ti < CREST_LIMIT:
            limitation = Limitation.CREST_FACTOR
        else:
            limitation = Limitation.LACKING_TRANSFER_INFO
        return CaseVerdict(case_id, gate.passed, limitation, report=report,
                           crest_ti=identified.crest_ti, mu_e_I=identified.mu_e_I,
                           details=details, errors=errors)

    def _case_free_float(self, seed: int) -> CaseVerdict:
        identified = self.identify_generated(seed, None, self.config.order_for("I"), None)
        reference = self.reference_run(seed + 1)
        candidate = self.apply_free_float(identified, reference)
        report = compare(reference, candidate, [self.config.zone])
        return self._gated_verdict("I", identified, report, identified.details())

    def _closed_loop_report(self, seed: int, identified: IdentifiedCase, topology: LoopTopology):
        setpoints = self.config.application_setpoints
        reference = self.reference_run(seed + 1, setpoints)
        candidate = self.apply_closed_loop(identified, reference, setpoints, topology)
        return reference, candidate, compare(reference, candidate, [self.config.zone])

    def _case_added_topology(self, seed: int) -> CaseVerdict:
        identified = self.identify_generated(seed, None, self.config.order_for("II"), None)
        _, candidate, report = self._closed_loop_report(seed, identified, ADDED)
        details = identified.details()
        details["hvac_excited"] = identified.hvac_excited
        details["loop_warnings"] = candidate.warnings
        errors = []
        ratio = None
        try:
            on_off = self.identify_generated(seed, self.config.identification_setpoints,
                                             self.config.order_for("III"), SEPARATE)
            _, _, on_off_report = self._closed_loop_report(seed, on_off, SEPARATE)
            details["sigma_on_off_model"] = on_off_report.sigma
            if on_off_report.sigma > 0:
                ratio = report.sigma / on_off_report.sigma
        except PIPELINE_ERRORS as exc:
            errors.append(describe_error(exc))
        details["sigma_ratio"] = ratio
        details["sigma_ratio_limit"] = self.config.sigma_ratio

        if ratio is not None:
            lacking = ratio >= self.config.sigma_ratio
        else:
            # no on/off comparison: fall back on whether the data saw any actuation
            lacking = not identified.hvac_excited
        limitation = Limitation.LACKING_TRANSFER_INFO if lacking else Limitation.NONE
        return CaseVerdict("II", not lacking, limitation, report=report, crest_ti=identified.crest_ti,
                           mu_e_I=identified.mu_e_I, details=details, errors=errors)

    def _case_on_off(self, seed: int) -> CaseVerdict:
        setpoints = self.config.identification_setpoints
        identified = self.identify_generated(seed, setpoints, self.config.order_for("III"), SEPARATE)
        reference, candidate, report = self._closed_loop_report(seed, identified, SEPARATE)
        details = identified.details()
        details["identification_setpoints"] = setpoints.to_dict()
        details["within_band_pct"] = within_band_fraction(candidate, self.config.application_setpoints)
        details["loop_warnings"] = candidate.warnings
        timing = timing_report(reference, candidate)
        logger.info(f"Case III speedup {timing.speedup:.1f}x over the reference year")
        verdict = self._gated_verdict("III", identified, report, details)
        verdict.timing = timing
        return verdict

    def _case_fine_step(self, seed: int) -> CaseVerdict:
        config = self.config
        setpoints = config.application_setpoints
        zone = config.zone
        identified = self.identify_generated(seed, config.identification_setpoints,
                                             config.order_for("IV"), SEPARATE)
        reference = self.reference_run(seed + 1, setpoints)
        per_day = int(round(SECONDS_PER_DAY / config.dt))
        start = config.fine_start_day * per_day
        stop = start + config.fine_days * per_day
        window = reference.slice(start, stop)
        fine_dt = config.dt / config.fine_factor

        x0 = self.initial_state(identified, window, zone)
        hourly = self.apply_closed_loop(identified, window, setpoints, x0=x0)
        fine_reference = self.simulator.simulate(
            window.climate, OnOffController(setpoints), dt_output=fine_dt,
            x0=float(window.temperature(zone).values[0]))

        rate_reference = switching_rate(fine_reference, zone)
        rate_hourly = switching_rate(hourly, zone)
        deficit = 1.0 - rate_hourly / rate_reference if rate_reference > 0 else 0.0
        details = identified.details()
        details.update({
            "fine_dt": fine_dt,
            "window_days": [config.fine_start_day, config.fine_start_day + config.fine_days],
            "switches_per_hour_reference_fine": rate_reference,
            "switches_per_hour_si_hourly": rate_hourly,
            "switching_deficit": deficit,
            "switching_deficit_limit": config.switch_deficit,
        })

        errors = []
        report = None
        try:
            fine_model = resample_model(identified.model, fine_dt)
            fine_si = self.apply_closed_loop(identified, fine_reference, setpoints, model=fine_model,
                                             x0=resample_state(identified.model, x0))
            details["fine_model_order"] = fine_model.order
            details["switches_per_hour_si_fine"] = switching_rate(fine_si, zone)
            details["loop_warnings"] = fine_si.warnings
            report = compare(fine_reference, fine_si, [zone])
        except PIPELINE_ERRORS as exc:
            errors.append(describe_error(exc))

        fast = deficit >= config.switch_deficit
        limitation = Limitation.TIME_STEP_FAST_DYNAMICS if fast else Limitation.NONE
        return CaseVerdict("IV", not fast, limitation, report=report, crest_ti=identified.crest_ti,
                           mu_e_I=identified.mu_e_I, details=details, errors=errors)

    def _case_transfer(self, seed: int) -> CaseVerdict:
        setpoints = self.config.transfer_setpoints
        identified = self.identify_generated(seed, setpoints, self.config.order_for("V"), SEPARATE)
        _, candidate, report = self._closed_loop_report(seed, identified, SEPARATE)
        details = identified.details()
        details["identification_setpoints"] = setpoints.to_dict()
        details["application_setpoints"] = self.config.application_setpoints.to_dict()
        details["loop_warnings"] = candidate.warnings
        return self._gated_verdict("V", identified, report, details)

    def _case_ham(self, seed: int) -> CaseVerdict:
        setpoints = self.config.ham_setpoints
        zone = self.config.zone
        identified = self.identify_generated(seed, setpoints, self.config.order_for("HAM"), SEPARATE,
                                             moisture=True)
        reference = self.reference_run(seed + 1, setpoints, ham=True)
        candidate = self.apply_closed_loop(identified, reference, setpoints, moisture=True)
        report = compare(reference, candidate, [zone])

        trace = candidate.zones[zone]
        recomputed = rh_from_tx(trace.temperature.values, np.maximum(trace.humidity_ratio.values, 0.0),
                                candidate.pressure)
        details = identified.details()
        details["rh_consistency_max_abs"] = float(np.max(np.abs(recomputed - trace.relative_humidity.values)))
        details["within_band_pct"] = within_band_fraction(candidate, setpoints)
        details["loop_warnings"] = candidate.warnings
        return self._gated_verdict("HAM", identified, report, details)

    def _case_external(self, seed: int) -> CaseVerdict:
        config = self.config
        if config.import_path:
            data = read_result(config.import_path)
        else:
            data = self.reference_run(seed, config.ext_setpoints, internal_gains=True)
        return self.evaluate_external(data, seed, source=config.import_path or "reference")[0]

    def evaluate_external(self, data: SimResult, seed: int = 0,
                          source: str = "import") -> Tuple[CaseVerdict, IdentifiedCase]:
        """
        Identify from an external run and close the loop at the external bands.

        The zone is CaseConfig.zone when the data carries it, the first zone otherwise;
        the internal-gain input is used when the data has one.

        Returns:
            (verdict of case EXT, the identified model with its figures)
        """
        config = self.config
        setpoints = config.ext_setpoints
        zone = config.zone if config.zone in data.zones else data.zone_names[0]
        internal = data.zones[zone].internal_gain is not None

        identified = self.identify(data, config.order_for("EXT"), SEPARATE, internal_gain=internal,
                                   zone=zone, noise_seed=seed)
        candidate = self.apply_closed_loop(identified, data, setpoints, zone=zone, internal_gain=internal)
        report = compare(data, candidate, [zone])
        details = identified.details()
        details.update({
            "source": source,
            "zone": zone,
            "ext_setpoints": setpoints.to_dict(),
            "within_band_pct": within_band_fraction(candidate, setpoints)["aggregate"],
            "within_band_pct_data": within_band_fraction(data, setpoints)[zone],
            "loop_warnings": candidate.warnings,
        })
        return self._gated_verdict("EXT", identified, report, details), identified

    # ------------------------------------------------------------------
    # Set-point sweep
    # ------------------------------------------------------------------

    def setpoint_sweep(self, pairs: Sequence[Union[OnOffSetpoints, Tuple[float, float]]],
                       orders: Sequence[int], seed: int = 0, workers: int = 1) -> List[SweepRow]:
        """
        Identify at each set-point pair and order, apply at the application set points.

        Rows come out ordered by pair, then order; row errors are recorded, not raised.

        Raises:
            ValueError: If pairs is empty
        """
        if not pairs:
            raise ValueError("The set-point sweep needs at least one identification pair")
        if not orders:
            return []
        pairs = [p if isinstance(p, OnOffSetpoints) else OnOffSetpoints(*p) for p in pairs]
        if workers <= 1 or len(pairs) < 2:
            return [row for pair in pairs for row in self.sweep_pair(pair, orders, seed)]

        results: Dict[int, List[SweepRow]] = {}
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_sweep_worker, self.config, pair, list(orders), seed): i
                       for i, pair in enumerate(pairs)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        return [row for i in range(len(pairs)) for row in results[i]]

    def sweep_pair(self, setpoints: OnOffSetpoints, orders: Sequence[int], seed: int = 0) -> List[SweepRow]:
        """Sweep rows of one identification set-point pair."""
        try:
            self.reference_run(seed, setpoints)
            self.reference_run(seed + 1, self.config.application_setpoints)
        except PIPELINE_ERRORS as exc:
            return [SweepRow(order, setpoints, error=describe_error(exc)) for order in sorted(orders)]

        rows = []
        for order in sorted(orders):
            try:
                identified = self.identify_generated(seed, setpoints, order, SEPARATE)
            except PIPELINE_ERRORS as exc:
                logger.warning(f"Sweep {setpoints.label()} order {order}: {describe_error(exc)}")
                rows.append(SweepRow(order, setpoints, error=describe_error(exc)))
                continue
            try:
                gate = identified.gate()
                _, _, report = self._closed_loop_report(seed, identified, SEPARATE)
                rows.append(SweepRow(order, setpoints, identified.crest_ti, identified.mu_e_I,
                                     report.mu_abs, report.sigma, gate))
            except PIPELINE_ERRORS as exc:
                rows.append(SweepRow(order, setpoints, identified.crest_ti, identified.mu_e_I,
                                     error=describe_error(exc)))
        return rows


def _case_worker(config: CaseConfig, case_id: str, seed: int) -> CaseVerdict:
    return CaseStudyService(config).run_case(case_id, seed)


def _sweep_worker(config: CaseConfig, setpoints: OnOffSetpoints, orders: List[int],
                  seed: int) -> List[SweepRow]:
    return CaseStudyService(config).sweep_pair(setpoints, orders, seed)
