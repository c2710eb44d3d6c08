"""On/off control set points and loop topologies."""
from enum import Enum
from typing import Optional


class OnOffSetpoints:
    """
    Dead-band set points of the thermostat and, optionally, the humidistat.

    Attributes:
        heating (float): T_h in degC, heat below it
        cooling (float): T_c in degC, cool above it
        humidify (float or None): RH_hum in %, humidify below it
        dehumidify (float or None): RH_dehum in %, dehumidify above it
    """

    def __init__(self, heating: float, cooling: float, humidify: Optional[float] = None,
                 dehumidify: Optional[float] = None):
        if not heating < cooling:
            raise ValueError(f"Heating set point {heating} must be below cooling set point {cooling}")
        if (humidify is None) != (dehumidify is None):
            raise ValueError("Humidity set points must be given as a pair")
        if humidify is not None and not humidify < dehumidify:
            raise ValueError(f"Humidify set point {humidify} must be below {dehumidify}")
        self.heating = float(heating)
        self.cooling = float(cooling)
        self.humidify = None if humidify is None else float(humidify)
        self.dehumidify = None if dehumidify is None else float(dehumidify)

    @property
    def has_humidity(self) -> bool:
        return self.humidify is not None

    @classmethod
    def parse(cls, text: str) -> "OnOffSetpoints":
        """Parse 'Th,Tc' or 'Th,Tc,RHh,RHd'."""
        parts = [float(p) for p in text.split(",") if p.strip()]
        if len(parts) not in (2, 4):
            raise ValueError(f"Expected 'Th,Tc' or 'Th,Tc,RHh,RHd', got '{text}'")
        return cls(*parts)

    def label(self) -> str:
        text = f"{self.heating:g}/{self.cooling:g}"
        if self.has_humidity:
            text += f" {self.humidify:g}/{self.dehumidify:g}%"
        return text

    def __repr__(self):
        return f"OnOffSetpoints({self.label()})"

    def to_dict(self):
        return {"heating": self.heating, "cooling": self.cooling,
                "humidify": self.humidify, "dehumidify": self.dehumidify}


class LoopTopology(Enum):
    """How the HVAC actuation reaches an identified model."""

    HVAC_ADDED_TO_SOLAR = "added"
    HVAC_SEPARATE_INPUT = "separate"

    def thermal_inputs(self, exogenous: int) -> int:
        """Expected model input count for a given number of exogenous thermal inputs."""
        return exogenous + (1 if self is LoopTopology.HVAC_SEPARATE_INPUT else 0)


class OnOffController:
    """Stateless thermostat (and humidistat) acting once per sample."""

    def __init__(self, setpoints: OnOffSetpoints):
        self.setpoints = setpoints

    def __repr__(self):
        return f"OnOffController({self.setpoints.label()})"


FREE_FLOAT = None
