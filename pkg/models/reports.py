"""Comparison reports, accuracy gates and case-study verdicts."""
import math
from enum import Enum
from typing import Any, Dict, List, Optional

from models.control import OnOffSetpoints


def _number(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class ComparisonReport:
    """
    Candidate-minus-reference error statistics of two simulations.

    Attributes:
        mu_abs (float): Mean absolute temperature error (degC)
        mu_signed (float): Mean signed error (degC)
        sigma (float): Standard deviation of the error (degC)
        per_zone (dict): Zone -> {'mu_abs', 'mu_signed', 'sigma'}
        energy_ref, energy_si (float): Heating + cooling energy (J)
        energy_rel_err (float): |energy_si - energy_ref| / energy_ref
        peak_freq_ref, peak_freq_si (float): Dominant T_i frequency of each run (Hz)
        runtime_ref, runtime_si (float): Wall-clock seconds of each run
        extras (dict): Further channel statistics (humidity, RH decomposition)
    """

    def __init__(self, mu_abs: float, mu_signed: float, sigma: float,
                 per_zone: Dict[str, Dict[str, float]], energy_ref: float, energy_si: float,
                 energy_rel_err: float, peak_freq_ref: float, peak_freq_si: float,
                 runtime_ref: float, runtime_si: float, extras: Optional[Dict[str, Any]] = None):
        self.mu_abs = mu_abs
        self.mu_signed = mu_signed
        self.sigma = sigma
        self.per_zone = per_zone
        self.energy_ref = energy_ref
        self.energy_si = energy_si
        self.energy_rel_err = energy_rel_err
        self.peak_freq_ref = peak_freq_ref
        self.peak_freq_si = peak_freq_si
        self.runtime_ref = runtime_ref
        self.runtime_si = runtime_si
        self.extras = dict(extras or {})

    @property
    def speedup(self) -> float:
        return self.runtime_ref / self.runtime_si

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        """Dictionary form; wall-clock fields are left out unless asked for."""
        data = {
            "mu_abs": _number(self.mu_abs),
            "mu_signed": _number(self.mu_signed),
            "sigma": _number(self.sigma),
            "per_zone": {zone: {k: _number(v) for k, v in stats.items()}
                         for zone, stats in self.per_zone.items()},
            "energy_ref_J": _number(self.energy_ref),
            "energy_si_J": _number(self.energy_si),
            "energy_rel_err": _number(self.energy_rel_err),
            "peak_freq_ref_hz": _number(self.peak_freq_ref),
            "peak_freq_si_hz": _number(self.peak_freq_si),
            "extras": self.extras,
        }
        if include_timing:
            data["runtime_ref_s"] = self.runtime_ref
            data["runtime_si_s"] = self.runtime_si
        return data


class GateResult:
    """Outcome of the accuracy gate with the failing conditions spelled out."""

    def __init__(self, passed: bool, reasons: List[str]):
        self.passed = passed
        self.reasons = list(reasons)

    def __bool__(self):
        return self.passed

    def __repr__(self):
        return f"GateResult(passed={self.passed}, reasons={self.reasons})"

    def to_dict(self):
        return {"passed": self.passed, "reasons": self.reasons}


class Limitation(Enum):
    NONE = "NONE"
    LACKING_TRANSFER_INFO = "LACKING_TRANSFER_INFO"
    CREST_FACTOR = "CREST_FACTOR"
    TIME_STEP_FAST_DYNAMICS = "TIME_STEP_FAST_DYNAMICS"


CASE_IDS = ("I", "II", "III", "IV", "V", "HAM", "EXT")


class CaseVerdict:
    """
    Whether an identified model can be used for a case-study application.

    Attributes:
        case_id (str): One of CASE_IDS
        possible (bool): True when the application is supported by the identified model
        limitation (Limitation): The observed limitation (never NONE when impossible)
        report (ComparisonReport or None): SI run against the reference run
        crest_ti (float or None): Centered crest factor of the identification T_i
        mu_e_I (float or None): Mean absolute validation error on the held-out half
        details (dict): Case-specific figures (switch rates, sigma ratios, band fractions)
        errors (list): Sub-pipeline errors recorded instead of aborting the case
        timing (TimingReport or None): Reference vs SI wall clock, for cases that measure it
    """

    def __init__(self, case_id: str, possible: bool, limitation: Limitation,
                 report: Optional[ComparisonReport] = None, crest_ti: Optional[float] = None,
                 mu_e_I: Optional[float] = None, details: Optional[Dict[str, Any]] = None,
                 errors: Optional[List[str]] = None, timing: Optional["TimingReport"] = None):
        if case_id not in CASE_IDS:
            raise ValueError(f"Unknown case id '{case_id}'")
        if not possible and limitation is Limitation.NONE:
            raise ValueError("An impossible case must name its limitation")
        self.case_id = case_id
        self.possible = possible
        self.limitation = limitation
        self.report = report
        self.crest_ti = crest_ti
        self.mu_e_I = mu_e_I
        self.details = dict(details or {})
        self.errors = list(errors or [])
        self.timing = timing

    def __repr__(self):
        return (f"CaseVerdict(case={self.case_id}, possible={self.possible}, "
                f"limitation={self.limitation.value})")

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        """Dictionary form; runtimes and speedup only with include_timing."""
        data = {
            "case": self.case_id,
            "possible": self.possible,
            "limitation": self.limitation.value,
            "crest_ti": _number(self.crest_ti),
            "mu_e_I": _number(self.mu_e_I),
            "report": self.report.to_dict(include_timing) if self.report else None,
            "details": self.details,
            "errors": self.errors,
        }
        if include_timing and self.timing is not None:
            data["timing"] = self.timing.to_dict()
        return data


class SweepRow:
    """One (identification set points, order) row of the set-point sensitivity sweep."""

    def __init__(self, order: int, setpoints: OnOffSetpoints, crest_ti: Optional[float] = None,
                 mu_e_I: Optional[float] = None, mu_e_II: Optional[float] = None,
                 sigma_e_II: Optional[float] = None, gate: Optional[GateResult] = None,
                 error: Optional[str] = None):
        self.order = order
        self.setpoints = setpoints
        self.crest_ti = crest_ti
        self.mu_e_I = mu_e_I
        self.mu_e_II = mu_e_II
        self.sigma_e_II = sigma_e_II
        self.gate = gate
        self.error = error

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "T_h_id": self.setpoints.heating,
            "T_c_id": self.setpoints.cooling,
            "crest_ti": _number(self.crest_ti),
            "mu_e_I": _number(self.mu_e_I),
            "mu_e_II": _number(self.mu_e_II),
            "sigma_e_II": _number(self.sigma_e_II),
            "gate": self.gate.to_dict() if self.gate is not None else None,
            "error": self.error,
        }


class TimingReport:
    """Wall-clock comparison of a reference run and an SI run on the same horizon."""

    def __init__(self, runtime_ref: float, runtime_si: float):
        if not (runtime_ref > 0 and runtime_si > 0):
            raise ValueError("Runtimes must be positive")
        self.runtime_ref = runtime_ref
        self.runtime_si = runtime_si
        self.speedup = runtime_ref / runtime_si

    def to_dict(self):
        return {"runtime_ref_s": self.runtime_ref, "runtime_si_s": self.runtime_si,
                "speedup": self.speedup}
