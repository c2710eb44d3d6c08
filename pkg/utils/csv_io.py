"""
Time-series CSV files (see FORMATS.md).

A file starts with one metadata comment per column, '#name,unit,t0,dt', then a
header row and one row per sample. Values are written with 17 significant
digits and read back with pandas' round-trip parser, so series survive a write
and read bit-exactly.
"""
import io
import logging
import math
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from models.climate import Climate
from models.sim_result import SimResult, ZoneTrace, parse_zone_column
from models.time_series import TimeSeries

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

CLIMATE_COLUMNS = {
    "To_C": "outdoor_temperature",
    "Qsolar_W": "solar_gain",
    "Isolar_Wm2": "irradiance",
    "Xo_kgkg": "humidity_ratio",
    "RHo_pct": "relative_humidity",
}

TRACE_FIELDS = {
    "Ti": "temperature",
    "Qhvac": "hvac_power",
    "Qsol": "solar_gain",
    "Qint": "internal_gain",
    "Xi": "humidity_ratio",
    "RHi": "relative_humidity",
    "Mhvac": "moisture_actuation",
    "Gvap": "moisture_source",
}


class FormatError(Exception):
    """Raised when a CSV file does not follow the time-series format."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column '{column}'")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
        self.line = line
        self.column = column


@contextmanager
def atomic_writer(path: Path) -> Iterator[TextIO]:
    """
    Text handle on a temporary file next to path, moved over path on success.

    Readers see the old file or the complete new one, never a partial write.
    The temporary file is removed if the body raises.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            yield handle
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_series(path: Union[str, Path], series: Sequence[TimeSeries]) -> Path:
    """Write series sharing one grid to a CSV file."""
    if not series:
        raise ValueError("Nothing to write")
    first = series[0]
    for other in series[1:]:
        if not other.same_grid(first):
            raise ValueError(f"Series '{other.name}' is not on the grid of '{first.name}'")
    path = Path(path)
    frame = pd.DataFrame({s.name: s.values for s in series})
    with atomic_writer(path) as handle:
        for s in series:
            handle.write(f"#{s.name},{s.unit},{s.t0!r},{s.dt!r}\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(series)} series x {len(first)} samples to {path}")
    return path


def _parse_metadata(lines: List[str]) -> Dict[str, Tuple[str, float, float]]:
    metadata = {}
    for number, line in enumerate(lines, start=1):
        parts = line[1:].strip().split(",")
        if len(parts) != 4:
            raise FormatError("Metadata must read '#name,unit,t0,dt'", line=number)
        name, unit, t0, dt = parts
        try:
            metadata[name] = (unit, float(t0), float(dt))
        except ValueError:
            raise FormatError("Metadata t0 and dt must be numbers", line=number, column=name)
    return metadata


def _locate_bad_value(frame: pd.DataFrame, first_data_line: int) -> FormatError:
    for column in frame.columns:
        for row, raw in enumerate(frame[column].tolist()):
            try:
                value = float(raw)
            except (TypeError, ValueError):
                return FormatError(f"Non-numeric value '{raw}'", line=first_data_line + row, column=column)
            if not math.isfinite(value):
                return FormatError(f"Non-finite value '{raw}'", line=first_data_line + row, column=column)
    return FormatError("Unreadable values")


def read_series(path: Union[str, Path], dt: Optional[float] = None, t0: float = 0.0) -> List[TimeSeries]:
    """
    Read every column of a time-series CSV file.

    Columns without a metadata line take the given dt (required then) and t0.

    Raises:
        FormatError: On malformed metadata, non-numeric cells or a missing dt
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"Cannot read {path}: {exc}")
    lines = text.splitlines()
    header_at = 0
    while header_at < len(lines) and lines[header_at].startswith("#"):
        header_at += 1
    metadata = _parse_metadata(lines[:header_at])
    if header_at >= len(lines):
        raise FormatError("Missing header row", line=header_at + 1)

    body = "\n".join(lines[header_at:])
    try:
        frame = pd.read_csv(io.StringIO(body), float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise FormatError(f"Malformed CSV body: {exc}", line=header_at + 1)
    if frame.empty:
        raise FormatError("No data rows", line=header_at + 2)
    first_data_line = header_at + 2
    if any(not pd.api.types.is_numeric_dtype(frame[c]) for c in frame.columns) or frame.isna().any().any():
        raw = pd.read_csv(io.StringIO(body), dtype=str, keep_default_na=False)
        raise _locate_bad_value(raw, first_data_line)

    series = []
    for column in frame.columns:
        unit, start, step = metadata.get(column, ("", t0, dt))
        if step is None:
            raise FormatError("No metadata line and no --dt given", column=column)
        values = frame[column].to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            raise _locate_bad_value(frame, first_data_line)
        try:
            series.append(TimeSeries(column, unit, start, step, values))
        except ValueError as exc:
            raise FormatError(str(exc), column=column)
    logger.info(f"Read {len(series)} series x {len(frame)} samples from {path}")
    return series


def write_result(path: Union[str, Path], result: SimResult) -> Path:
    """Write the climate and every zone channel of a result."""
    return write_series(path, result.channels())


def write_climate(path: Union[str, Path], climate: Climate) -> Path:
    return write_series(path, climate.channels())


def climate_from_series(series: Sequence[TimeSeries]) -> Climate:
    """Climate from named columns; To_C and Qsolar_W are required."""
    found = {CLIMATE_COLUMNS[s.name]: s for s in series if s.name in CLIMATE_COLUMNS}
    for required in ("To_C", "Qsolar_W"):
        if CLIMATE_COLUMNS[required] not in found:
            raise FormatError("Missing required climate column", column=required)
    try:
        return Climate(**found)
    except ValueError as exc:
        raise FormatError(str(exc))


def result_from_series(series: Sequence[TimeSeries]) -> SimResult:
    """
    Imported simulation result from named columns.

    Requires To_C, Qsolar_W and, per zone, Ti_<zone>_C and Qhvac_<zone>_W.
    """
    climate = climate_from_series(series)
    fields: Dict[str, Dict[str, TimeSeries]] = {}
    for s in series:
        parsed = parse_zone_column(s.name)
        if parsed is None:
            continue
        kind, zone = parsed
        fields.setdefault(zone, {})[TRACE_FIELDS[kind]] = s
    if not fields:
        raise FormatError("No zone columns (Ti_<zone>_C) found")

    zones = {}
    for zone, channels in fields.items():
        for kind in ("Ti", "Qhvac"):
            if TRACE_FIELDS[kind] not in channels:
                raise FormatError(f"Zone '{zone}' lacks its {kind} column",
                                  column=f"{kind}_{zone}")
        try:
            zones[zone] = ZoneTrace(**channels)
        except ValueError as exc:
            raise FormatError(str(exc))
    return SimResult(zones, climate=climate, pressure=climate.pressure, source="import")


def read_result(path: Union[str, Path], dt: Optional[float] = None, t0: float = 0.0) -> SimResult:
    return result_from_series(read_series(path, dt=dt, t0=t0))


def read_climate(path: Union[str, Path], dt: Optional[float] = None, t0: float = 0.0) -> Climate:
    return climate_from_series(read_series(path, dt=dt, t0=t0))
