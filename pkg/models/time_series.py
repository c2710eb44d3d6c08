"""Uniformly sampled time-series model and the records derived from it."""
from typing import Optional, Sequence

import numpy as np


class TimeSeries:
    """
    A uniformly sampled signal with units.

    Attributes:
        name (str): Channel label (e.g. 'To_C')
        unit (str): Unit label (e.g. 'degC', 'W')
        t0 (float): Epoch seconds of the first sample
        dt (float): Sample period in seconds (> 0)
        values (np.ndarray): Read-only sample values (length >= 1, all finite)
    """

    def __init__(self, name: str, unit: str, t0: float, dt: float, values: Sequence[float]):
        dt = float(dt)
        if not dt > 0 or not np.isfinite(dt):
            raise ValueError(f"Sample period must be strictly positive, got {dt}")

        array = np.array(values, dtype=float).ravel()
        if array.size < 1:
            raise ValueError("A time series needs at least one sample")
        if not np.all(np.isfinite(array)):
            raise ValueError(f"Time series '{name}' contains non-finite values")
        array.flags.writeable = False

        self.name = name
        self.unit = unit
        self.t0 = float(t0)
        self.dt = dt
        self.values = array

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return (f"TimeSeries(name='{self.name}', unit='{self.unit}', "
                f"t0={self.t0}, dt={self.dt}, n={len(self)})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return False
        return (self.name == other.name and self.unit == other.unit
                and self.t0 == other.t0 and self.dt == other.dt
                and np.array_equal(self.values, other.values))

    __hash__ = None

    @property
    def times(self) -> np.ndarray:
        """Sample instants in epoch seconds."""
        return self.t0 + self.dt * np.arange(len(self))

    def same_grid(self, other: "TimeSeries") -> bool:
        """True when both series share t0, dt and length."""
        return self.t0 == other.t0 and self.dt == other.dt and len(self) == len(other)

    def with_values(self, values: Sequence[float], name: Optional[str] = None,
                    unit: Optional[str] = None) -> "TimeSeries":
        """Copy of this series on the same grid with new values."""
        return TimeSeries(
            name if name is not None else self.name,
            unit if unit is not None else self.unit,
            self.t0, self.dt, values
        )

    def slice(self, start: int, stop: int) -> "TimeSeries":
        """Samples [start, stop) as a new series with a shifted t0."""
        return TimeSeries(self.name, self.unit, self.t0 + start * self.dt, self.dt,
                          self.values[start:stop])


class SignalDiagnostics:
    """
    Sampling and excitation diagnostics of one series.

    Crest fields hold None when the applicable RMS is zero ("not defined").
    """

    NOT_DEFINED = "not defined"

    def __init__(
        self,
        name: str,
        sample_freq_hz: float,
        mean: float,
        rms: float,
        max_raw: float,
        crest_raw: Optional[float],
        crest_centered: Optional[float]
    ):
        self.name = name
        self.sample_freq_hz = sample_freq_hz
        self.nyquist_freq_hz = sample_freq_hz / 2
        self.mean = mean
        self.rms = rms
        self.max_raw = max_raw
        self.crest_raw = crest_raw
        self.crest_centered = crest_centered

    def to_dict(self) -> dict:
        """Dictionary form; undefined crest factors carry the NOT_DEFINED marker."""
        return {
            "name": self.name,
            "sample_freq_hz": self.sample_freq_hz,
            "nyquist_freq_hz": self.nyquist_freq_hz,
            "mean": self.mean,
            "rms": self.rms,
            "max_raw": self.max_raw,
            "crest_raw": self.crest_raw if self.crest_raw is not None else self.NOT_DEFINED,
            "crest_centered": (self.crest_centered if self.crest_centered is not None
                               else self.NOT_DEFINED),
        }


class Spectrum:
    """One-sided magnitude spectrum of a mean-removed series."""

    def __init__(self, freqs_hz: np.ndarray, magnitudes: np.ndarray):
        if len(freqs_hz) != len(magnitudes):
            raise ValueError("Frequency and magnitude arrays must have the same length")
        self.freqs_hz = np.asarray(freqs_hz, dtype=float)
        self.magnitudes = np.asarray(magnitudes, dtype=float)

    def peak_frequency(self) -> float:
        """Frequency of the largest magnitude bin, DC excluded."""
        if len(self.magnitudes) < 2:
            return 0.0
        return float(self.freqs_hz[1 + int(np.argmax(self.magnitudes[1:]))])
