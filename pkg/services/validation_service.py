"""Comparison of simulation results, accuracy gating and timing."""
import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from models.reports import ComparisonReport, GateResult, TimingReport
from models.sim_result import SimResult
from services.reference_simulator import annual_energy
from services.signal_service import dominant_frequency
from utils.psychrometrics import rh_sensitivities

logger = logging.getLogger(__name__)

CREST_LIMIT = 4.0
ERROR_LIMIT_DEGC = 0.05


class GridMismatch(Exception):
    """Raised when two results do not share a sampling grid or any zone."""
    pass


def _error_stats(error: np.ndarray) -> Dict[str, float]:
    return {"mu_abs": float(np.mean(np.abs(error))),
            "mu_signed": float(np.mean(error)),
            "sigma": float(np.std(error))}


def common_zones(reference: SimResult, candidate: SimResult,
                 zones: Optional[Sequence[str]] = None) -> List[str]:
    names = [z for z in (zones or reference.zone_names) if z in reference.zones and z in candidate.zones]
    if not names:
        raise GridMismatch(f"No common zone between {reference.zone_names} and {candidate.zone_names}")
    return names


def _energy(result: SimResult, zones: Sequence[str]) -> float:
    per_zone = annual_energy(result)
    return sum(per_zone[z][0] + per_zone[z][1] for z in zones)


def _relative(value: float, reference: float) -> float:
    if reference == 0:
        return 0.0 if value == 0 else math.inf
    return abs(value - reference) / reference


def compare(reference: SimResult, candidate: SimResult,
            zones: Optional[Sequence[str]] = None) -> ComparisonReport:
    """
    Candidate-minus-reference statistics over the zones both results carry.

    Raises:
        GridMismatch: If the grids differ or no zone is shared
    """
    if not reference.same_grid(candidate):
        raise GridMismatch(
            f"Grids differ: reference t0={reference.t0} dt={reference.dt} n={len(reference)}, "
            f"candidate t0={candidate.t0} dt={candidate.dt} n={len(candidate)}")
    names = common_zones(reference, candidate, zones)

    per_zone = {}
    errors = []
    for name in names:
        error = candidate.temperature(name).values - reference.temperature(name).values
        per_zone[name] = _error_stats(error)
        errors.append(error)
    pooled = _error_stats(np.concatenate(errors))

    energy_ref = _energy(reference, names)
    energy_si = _energy(candidate, names)

    peak_ref = peak_si = 0.0
    if len(reference) >= 4:
        peak_ref = dominant_frequency(reference.temperature(names[0]))
        peak_si = dominant_frequency(candidate.temperature(names[0]))

    extras = {}
    for name in names:
        ref_trace, cand_trace = reference.zones[name], candidate.zones[name]
        if ref_trace.humidity_ratio is not None and cand_trace.humidity_ratio is not None:
            extras[name] = rh_error_decomposition(reference, candidate, name)

    report = ComparisonReport(
        mu_abs=pooled["mu_abs"], mu_signed=pooled["mu_signed"], sigma=pooled["sigma"],
        per_zone=per_zone, energy_ref=energy_ref, energy_si=energy_si,
        energy_rel_err=_relative(energy_si, energy_ref),
        peak_freq_ref=peak_ref, peak_freq_si=peak_si,
        runtime_ref=reference.runtime_s, runtime_si=candidate.runtime_s, extras=extras,
    )
    logger.debug(f"Comparison over {names}: mu_abs={report.mu_abs:.4g}, sigma={report.sigma:.4g}")
    return report


def rh_error_decomposition(reference: SimResult, candidate: SimResult, zone: str) -> Dict[str, float]:
    """
    Split the indoor RH error into the parts propagated from the T and X errors.

    The linearized estimate dRH/dT * e_T + dRH/dX * e_X is evaluated at the reference state.
    """
    ref, cand = reference.zones[zone], candidate.zones[zone]
    t_ref = ref.temperature.values
    x_ref = ref.humidity_ratio.values
    e_t = cand.temperature.values - t_ref
    e_x = cand.humidity_ratio.values - x_ref
    e_rh = cand.relative_humidity.values - ref.relative_humidity.values
    d_rh_dt, d_rh_dx = rh_sensitivities(t_ref, x_ref, reference.pressure)
    from_t = d_rh_dt * e_t
    from_x = d_rh_dx * e_x
    linear = from_t + from_x
    return {
        "mu_abs_X": float(np.mean(np.abs(e_x))),
        "mu_abs_RH": float(np.mean(np.abs(e_rh))),
        "mu_abs_RH_from_T": float(np.mean(np.abs(from_t))),
        "mu_abs_RH_from_X": float(np.mean(np.abs(from_x))),
        "mu_abs_RH_linearized": float(np.mean(np.abs(linear))),
        "mu_abs_RH_residual": float(np.mean(np.abs(e_rh - linear))),
    }


def accuracy_gate(crest_ti: Optional[float], mu_e_I: float,
                  crest_limit: float = CREST_LIMIT,
                  error_limit: float = ERROR_LIMIT_DEGC) -> GateResult:
    """
    Whether identification data carried enough transfer information.

    Passes iff crest_ti < crest_limit and mu_e_I < error_limit (both strict). An
    undefined crest factor (None) fails.
    """
    if mu_e_I is None or not math.isfinite(mu_e_I):
        raise ValueError(f"Validation error must be finite, got {mu_e_I}")
    if crest_ti is not None and not math.isfinite(crest_ti):
        raise ValueError(f"Crest factor must be finite, got {crest_ti}")
    reasons = []
    if crest_ti is None:
        reasons.append("crest factor of T_i is not defined (no excitation)")
    elif not crest_ti < crest_limit:
        reasons.append(f"crest factor {crest_ti:.4g} >= {crest_limit:g}")
    if not mu_e_I < error_limit:
        reasons.append(f"validation error {mu_e_I:.4g} degC >= {error_limit:g} degC")
    return GateResult(not reasons, reasons)


def timing_report(reference: SimResult, candidate: SimResult) -> TimingReport:
    """
    Wall-clock comparison of two runs over the same horizon.

    Raises:
        GridMismatch: If the runs cover different horizons
    """
    horizon_ref = len(reference) * reference.dt
    horizon_si = len(candidate) * candidate.dt
    if reference.t0 != candidate.t0 or not math.isclose(horizon_ref, horizon_si, rel_tol=1e-9):
        raise GridMismatch(f"Horizons differ: {horizon_ref} s vs {horizon_si} s")
    report = TimingReport(reference.runtime_s, candidate.runtime_s)
    logger.info(f"Timing: reference {report.runtime_ref:.3f} s, SI {report.runtime_si:.4f} s, "
                f"speedup {report.speedup:.1f}x")
    return report
