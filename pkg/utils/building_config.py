"""Building configuration files (INI style, see FORMATS.md)."""
import configparser
from pathlib import Path
from typing import Dict, List, Optional, Union

from models.building import STANDARD_PRESSURE_PA, Building, HvacConfig, WallBranch, ZoneParams

DEFAULT_BUILDING_PATH = Path(__file__).resolve().parent.parent / "data" / "building4.cfg"
ZONE_PREFIX = "zone:"


class ConfigError(Exception):
    """Raised when a configuration file is missing, malformed or inconsistent."""
    pass


def _float(section: configparser.SectionProxy, key: str, default: Optional[float] = None) -> Optional[float]:
    raw = section.get(key)
    if raw is None or raw.strip().lower() in ("", "none"):
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = '{raw}' is not a number")


def _pairs(section: configparser.SectionProxy, key: str) -> List[List[str]]:
    raw = section.get(key, "")
    items = [item.strip() for item in raw.split(",") if item.strip()]
    pairs = [item.split(":") for item in items]
    for item, pair in zip(items, pairs):
        if len(pair) != 2:
            raise ConfigError(f"[{section.name}] {key}: expected 'a:b' entries, got '{item}'")
    return pairs


def _walls(section: configparser.SectionProxy) -> List[WallBranch]:
    try:
        return [WallBranch(float(r), float(c)) for r, c in _pairs(section, "walls")]
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] walls: {exc}")


def _couplings(section: configparser.SectionProxy) -> Dict[str, float]:
    try:
        return {name.strip(): float(value) for name, value in _pairs(section, "couplings")}
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] couplings: {exc}")


def _zone(section: configparser.SectionProxy) -> ZoneParams:
    name = section.name[len(ZONE_PREFIX):].strip()
    hours = [h.strip() for h in section.get("occupancy_hours", "8, 18").split(",")]
    try:
        occupancy = (float(hours[0]), float(hours[1]))
    except (ValueError, IndexError):
        raise ConfigError(f"[{section.name}] occupancy_hours must be 'start, end'")
    air_capacitance = _float(section, "air_capacitance")
    if air_capacitance is None:
        raise ConfigError(f"[{section.name}] air_capacitance is required")
    try:
        return ZoneParams(
            name=name,
            air_capacitance=air_capacitance,
            walls=_walls(section),
            ventilation_conductance=_float(section, "ventilation_conductance", 0.0),
            solar_aperture=_float(section, "solar_aperture"),
            mass_resistance=_float(section, "mass_resistance"),
            mass_capacitance=_float(section, "mass_capacitance"),
            solar_to_mass=_float(section, "solar_to_mass", 0.0),
            couplings=_couplings(section),
            internal_gain=_float(section, "internal_gain", 0.0),
            occupancy_hours=occupancy,
            moisture_capacitance=_float(section, "moisture_capacitance", 180.0),
            ventilation_mass_flow=_float(section, "ventilation_mass_flow", 0.0),
            vapor_production=_float(section, "vapor_production", 0.0),
            buffer_mass=_float(section, "buffer_mass", 0.0),
            buffer_exchange=_float(section, "buffer_exchange", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


def parse_building(text: str, source: str = "<string>") -> Building:
    """
    Build a Building from configuration text.

    Raises:
        ConfigError: On syntax errors, missing keys or invalid values
    """
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}")

    if not parser.has_section("building"):
        raise ConfigError(f"{source}: missing [building] section")
    building = parser["building"]
    zones = [_zone(parser[name]) for name in parser.sections() if name.startswith(ZONE_PREFIX)]
    if not zones:
        raise ConfigError(f"{source}: no [zone:<name>] sections")

    hvac = HvacConfig()
    if parser.has_section("hvac"):
        section = parser["hvac"]
        try:
            hvac = HvacConfig(
                heating_capacity=_float(section, "heating_capacity", 1500.0),
                cooling_capacity=_float(section, "cooling_capacity", 1000.0),
                humidification_capacity=_float(section, "humidification_capacity", 0.0),
                dehumidification_capacity=_float(section, "dehumidification_capacity", 0.0),
            )
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}")

    try:
        return Building(
            name=building.get("name", Path(source).stem),
            zones=zones,
            hvac=hvac,
            initial_temperature=_float(building, "initial_temperature", 20.0),
            initial_humidity=_float(building, "initial_humidity"),
            pressure=_float(building, "pressure", STANDARD_PRESSURE_PA),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}")


def load_building(path: Union[str, Path, None] = None) -> Building:
    """Read a building file; None reads the canonical four-zone building."""
    path = Path(path) if path is not None else DEFAULT_BUILDING_PATH
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"Cannot read building config {path}: {exc}")
    return parse_building(text, source=str(path))
