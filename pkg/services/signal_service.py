"""
Excitation diagnostics, spectra and sampling helpers for time series.

The crest factor comes in two flavours. The raw form is max(u) / rms(u). The
centered form removes the mean first and uses max|u - mean|, so it does not
depend on the offset of the signal (a room temperature around 20 degC and one
around 0 degC give the same value). All acceptance gates use the centered form.

Spectrum normalization: one-sided magnitudes of the mean-removed series,
|X_k| * sqrt(w_k / N) with w_k = 1 for the DC and Nyquist bins and 2 otherwise,
so that sum(magnitudes**2) == sum((u - mean)**2).
"""
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from models.time_series import SignalDiagnostics, Spectrum, TimeSeries

logger = logging.getLogger(__name__)

_ZERO_RMS_RTOL = 1e-12


class ZeroPowerSignal(Exception):
    """Raised when a crest factor is requested for a signal without power (no excitation)."""
    pass


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float).ravel()


def crest_factor(series, centered: bool = True) -> float:
    """
    Crest factor of a series.

    Args:
        series: TimeSeries or array of samples
        centered: Remove the mean and use max|u| (default) instead of the raw max(u)

    Returns:
        Dimensionless crest factor (>= 1 for the centered form)

    Raises:
        ZeroPowerSignal: If the applicable RMS is zero
    """
    u = _values(series)
    if u.size < 1:
        raise ValueError("Crest factor needs at least one sample")
    if centered:
        u = u - u.mean()
        peak = np.max(np.abs(u))
    else:
        peak = np.max(u)
    rms = float(np.sqrt(np.mean(u * u)))
    if rms <= _ZERO_RMS_RTOL * max(1.0, float(np.max(np.abs(_values(series))))):
        kind = "centered" if centered else "raw"
        raise ZeroPowerSignal(f"{kind} RMS is zero: no excitation, identification impossible")
    return float(peak / rms)


def diagnose(series: TimeSeries) -> SignalDiagnostics:
    """
    Sampling and excitation diagnostics of a series.

    Undefined crest factors are recorded as None (rendered "not defined") instead of
    raising, so a constant channel can still be reported.
    """
    if len(series) < 2:
        raise ValueError(f"Diagnostics need at least 2 samples, '{series.name}' has {len(series)}")
    u = series.values
    crest = {}
    for centered in (False, True):
        try:
            crest[centered] = crest_factor(u, centered=centered)
        except ZeroPowerSignal as exc:
            logger.debug(f"{series.name}: {exc}")
            crest[centered] = None
    return SignalDiagnostics(
        name=series.name,
        sample_freq_hz=1.0 / series.dt,
        mean=float(np.mean(u)),
        rms=float(np.sqrt(np.mean(u * u))),
        max_raw=float(np.max(u)),
        crest_raw=crest[False],
        crest_centered=crest[True],
    )


def spectrum(series: TimeSeries) -> Spectrum:
    """One-sided magnitude spectrum of the mean-removed series (see module docstring)."""
    n = len(series)
    if n < 4:
        raise ValueError(f"A spectrum needs at least 4 samples, '{series.name}' has {n}")
    u = series.values - series.values.mean()
    coefficients = np.fft.rfft(u)
    weights = np.full(coefficients.size, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    magnitudes = np.abs(coefficients) * np.sqrt(weights / n)
    return Spectrum(np.fft.rfftfreq(n, d=series.dt), magnitudes)


def dominant_frequency(series: TimeSeries) -> float:
    """Frequency (Hz) of the strongest non-DC spectral bin."""
    return spectrum(series).peak_frequency()


def split_halves(series: TimeSeries) -> Tuple[TimeSeries, TimeSeries]:
    """Estimation half (floor(N/2) samples) and validation half."""
    n = len(series)
    if n < 4:
        raise ValueError(f"Splitting needs at least 4 samples, '{series.name}' has {n}")
    half = n // 2
    return series.slice(0, half), series.slice(half, n)


def sample(generator: Callable[[np.ndarray], np.ndarray], t0: float, dt: float, n: int,
           name: str = "u", unit: str = "") -> TimeSeries:
    """
    Evaluate a continuous-time generator at the sample instants t0 + k * dt.

    Generators that agree on those instants give bit-identical series, whatever
    they do between samples.
    """
    times = t0 + dt * np.arange(n)
    return TimeSeries(name, unit, t0, dt, generator(times))


def prbs(n: int, seed: int, levels: Sequence[float] = (-1.0, 1.0), min_hold: int = 1,
         t0: float = 0.0, dt: float = 1.0, name: str = "u", unit: str = "") -> TimeSeries:
    """
    Seeded pseudo-random binary sequence.

    Each level is held for a random whole number of samples, at least min_hold, so the
    excitation bandwidth can be lowered for slow systems.
    """
    if n < 1 or min_hold < 1:
        raise ValueError("PRBS length and minimum hold must be at least 1")
    low, high = float(levels[0]), float(levels[1])
    rng = np.random.default_rng(seed)
    values = np.empty(n)
    level = rng.integers(2)
    k = 0
    while k < n:
        hold = min_hold * int(rng.integers(1, 4))
        values[k:k + hold] = high if level else low
        k += hold
        level = 1 - level
    return TimeSeries(name, unit, t0, dt, values)


def resample_hold(series: TimeSeries, dt: float) -> TimeSeries:
    """
    Move a series onto another period by zero-order hold.

    A finer period repeats every sample dt_old / dt times; a coarser one keeps every
    dt / dt_old-th sample.

    Raises:
        ValueError: If the ratio of the two periods is not an integer
    """
    if dt == series.dt:
        return series
    finer = dt < series.dt
    ratio = series.dt / dt if finer else dt / series.dt
    factor = int(round(ratio))
    if factor < 1 or abs(ratio - factor) > 1e-9 * ratio:
        raise ValueError(f"Cannot resample dt={series.dt} onto dt={dt}: ratio {ratio} is not an integer")
    values = np.repeat(series.values, factor) if finer else series.values[::factor]
    return TimeSeries(series.name, series.unit, series.t0, dt, values)


def add_noise(series: TimeSeries, std: float, seed: Optional[int]) -> TimeSeries:
    """Series plus seeded white Gaussian measurement noise."""
    if std == 0:
        return series
    rng = np.random.default_rng(seed)
    return series.with_values(series.values + rng.normal(0.0, std, len(series)))
