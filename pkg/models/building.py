"""
Building model for the reference simulator.

A building is a set of zones joined into a lumped RC network: one air node per
zone, one node per wall branch (half the branch resistance on each side), an
optional internal-mass node behind the air node, and inter-zone conductances
between air nodes. Moisture uses a parallel network of air and hygric-buffer
nodes per zone.
"""
from typing import Dict, List, Optional, Tuple

import numpy as np

STANDARD_PRESSURE_PA = 101325.0


class WallBranch:
    """An envelope element to outdoor: total resistance (K/W) and capacitance (J/K)."""

    def __init__(self, resistance: float, capacitance: float):
        if not resistance > 0:
            raise ValueError(f"Wall resistance must be positive (K/W), got {resistance}; "
                             "a zero-resistance wall has no finite conductance")
        if not capacitance > 0:
            raise ValueError(f"Wall capacitance must be positive, got {capacitance}")
        self.resistance = float(resistance)
        self.capacitance = float(capacitance)

    def __repr__(self):
        return f"WallBranch(R={self.resistance}, C={self.capacitance})"


class ZoneParams:
    """
    Thermal and hygric parameters of one zone.

    Attributes:
        name (str): Zone label used in column names
        air_capacitance (float): Effective air-node heat capacitance (J/K)
        walls (list): WallBranch elements to outdoor
        ventilation_conductance (float): Air-node conductance to outdoor (W/K)
        solar_aperture (float or None): m2 mapping irradiance to zone gain; None uses the
            climate's direct solar gain series
        mass_resistance, mass_capacitance: Internal mass behind the air node (optional)
        solar_to_mass (float): Fraction of the zone's solar gain absorbed by the internal mass
        couplings (dict): Inter-zone conductances (W/K) keyed by neighbour name
        internal_gain (float): Heat released into the air while occupied (W)
        occupancy_hours (tuple): (start, end) hour of day of occupancy
        moisture_capacitance (float): Air mass (kg dry air)
        ventilation_mass_flow (float): Outdoor air exchange (kg/s)
        vapor_production (float): Internal vapour production (kg/s)
        buffer_mass (float): Lumped hygric buffer (kg-equivalent of air), 0 for none
        buffer_exchange (float): Buffer exchange coefficient (kg/s)

    Conductances and flows may be 0 (no link); resistances and capacitances must be
    positive.
    """

    def __init__(
        self,
        name: str,
        air_capacitance: float,
        walls: Optional[List[WallBranch]] = None,
        ventilation_conductance: float = 0.0,
        solar_aperture: Optional[float] = None,
        mass_resistance: Optional[float] = None,
        mass_capacitance: Optional[float] = None,
        solar_to_mass: float = 0.0,
        couplings: Optional[Dict[str, float]] = None,
        internal_gain: float = 0.0,
        occupancy_hours: Tuple[float, float] = (8.0, 18.0),
        moisture_capacitance: float = 180.0,
        ventilation_mass_flow: float = 0.0,
        vapor_production: float = 0.0,
        buffer_mass: float = 0.0,
        buffer_exchange: float = 0.0
    ):
        if not air_capacitance > 0:
            raise ValueError(f"Zone '{name}': air capacitance must be positive")
        if not moisture_capacitance > 0:
            raise ValueError(f"Zone '{name}': moisture capacitance must be positive")
        for label, value in (("ventilation conductance", ventilation_conductance),
                             ("ventilation mass flow", ventilation_mass_flow),
                             ("buffer mass", buffer_mass),
                             ("buffer exchange", buffer_exchange),
                             ("vapour production", vapor_production)):
            if value < 0:
                raise ValueError(f"Zone '{name}': {label} must be non-negative")
        if (mass_resistance is None) != (mass_capacitance is None):
            raise ValueError(f"Zone '{name}': internal mass needs both resistance and capacitance")
        if mass_resistance is not None and not mass_resistance > 0:
            raise ValueError(f"Zone '{name}': internal mass resistance must be positive (K/W), got {mass_resistance}")
        if mass_capacitance is not None and not mass_capacitance > 0:
            raise ValueError(f"Zone '{name}': internal mass capacitance must be positive")
        if not 0.0 <= solar_to_mass <= 1.0:
            raise ValueError(f"Zone '{name}': solar_to_mass must lie in [0, 1]")
        if solar_to_mass > 0 and mass_capacitance is None:
            raise ValueError(f"Zone '{name}': solar_to_mass needs an internal mass")
        for neighbour, conductance in (couplings or {}).items():
            if conductance < 0:
                raise ValueError(f"Zone '{name}': coupling to '{neighbour}' is negative")
        if buffer_mass > 0 and buffer_exchange <= 0:
            raise ValueError(f"Zone '{name}': a hygric buffer needs a positive exchange coefficient")

        self.name = name
        self.air_capacitance = float(air_capacitance)
        self.walls = list(walls or [])
        self.ventilation_conductance = float(ventilation_conductance)
        self.solar_aperture = solar_aperture
        self.mass_resistance = mass_resistance
        self.mass_capacitance = mass_capacitance
        self.solar_to_mass = float(solar_to_mass)
        self.couplings = dict(couplings or {})
        self.internal_gain = float(internal_gain)
        self.occupancy_hours = tuple(occupancy_hours)
        self.moisture_capacitance = float(moisture_capacitance)
        self.ventilation_mass_flow = float(ventilation_mass_flow)
        self.vapor_production = float(vapor_production)
        self.buffer_mass = float(buffer_mass)
        self.buffer_exchange = float(buffer_exchange)

    @property
    def has_mass(self) -> bool:
        return self.mass_capacitance is not None

    @property
    def has_buffer(self) -> bool:
        return self.buffer_mass > 0

    def __repr__(self):
        return (f"ZoneParams(name='{self.name}', C_air={self.air_capacitance}, "
                f"walls={len(self.walls)}, mass={self.has_mass})")


class HvacConfig:
    """Per-zone heating/cooling (W) and (de)humidification (kg/s) capacities."""

    def __init__(self, heating_capacity: float = 1500.0, cooling_capacity: float = 1000.0,
                 humidification_capacity: float = 0.0, dehumidification_capacity: float = 0.0):
        for label, value in (("heating", heating_capacity), ("cooling", cooling_capacity),
                             ("humidification", humidification_capacity),
                             ("dehumidification", dehumidification_capacity)):
            if value < 0:
                raise ValueError(f"HVAC {label} capacity must be non-negative")
        self.heating_capacity = float(heating_capacity)
        self.cooling_capacity = float(cooling_capacity)
        self.humidification_capacity = float(humidification_capacity)
        self.dehumidification_capacity = float(dehumidification_capacity)

    def __repr__(self):
        return (f"HvacConfig(Q_h={self.heating_capacity}, Q_c={self.cooling_capacity}, "
                f"hum={self.humidification_capacity}, dehum={self.dehumidification_capacity})")


class Network:
    """
    Continuous-time linear network C dx/dt = -G x + g_out * ambient + q.

    Attributes:
        names (list): Node labels
        A (np.ndarray): -C^-1 G including the conductances to ambient
        ambient_gain (np.ndarray): C^-1 g_out, multiplies the ambient value
        inverse_capacitance (np.ndarray): 1 / C per node, multiplies injected sources
        capacitance (np.ndarray): Node capacitances
        air_index (dict): Zone name -> air node index
        mass_index (dict): Zone name -> internal-mass or buffer node index
    """

    def __init__(self, names, capacitance, conductance, ambient_conductance,
                 air_index, mass_index):
        self.names = names
        self.capacitance = np.asarray(capacitance, dtype=float)
        self.conductance = np.asarray(conductance, dtype=float)
        self.ambient_conductance = np.asarray(ambient_conductance, dtype=float)
        self.inverse_capacitance = 1.0 / self.capacitance
        G = self.conductance + np.diag(self.ambient_conductance)
        self.A = -self.inverse_capacitance[:, None] * G
        self.ambient_gain = self.inverse_capacitance * self.ambient_conductance
        self.air_index = air_index
        self.mass_index = mass_index

    @property
    def size(self) -> int:
        return len(self.names)

    def fastest_time_constant(self) -> float:
        """Smallest 1/|lambda| over the network modes (infinite for an isolated network)."""
        rate = np.max(np.abs(np.linalg.eigvals(self.A))) if self.size else 0.0
        return float("inf") if rate == 0 else float(1.0 / rate)


class Building:
    """
    A multi-zone building.

    Attributes:
        name (str): Building label
        zones (list): ZoneParams in column order
        hvac (HvacConfig): Installed capacities per zone
        initial_temperature (float): Starting temperature of every node (degC)
        initial_humidity (float or None): Starting absolute humidity (kg/kg); None uses outdoor
        pressure (float): Atmospheric pressure for psychrometrics (Pa)
    """

    def __init__(self, name: str, zones: List[ZoneParams], hvac: Optional[HvacConfig] = None,
                 initial_temperature: float = 20.0, initial_humidity: Optional[float] = None,
                 pressure: float = STANDARD_PRESSURE_PA):
        if not zones:
            raise ValueError("A building needs at least one zone")
        names = [zone.name for zone in zones]
        if len(set(names)) != len(names):
            raise ValueError(f"Zone names must be unique: {names}")
        if not pressure > 0:
            raise ValueError("Pressure must be positive")
        self.name = name
        self.zones = list(zones)
        self.hvac = hvac or HvacConfig()
        self.initial_temperature = float(initial_temperature)
        self.initial_humidity = initial_humidity
        self.pressure = float(pressure)
        self._check_couplings()

    def _check_couplings(self) -> None:
        by_name = {zone.name: zone for zone in self.zones}
        for zone in self.zones:
            for neighbour, conductance in zone.couplings.items():
                if neighbour not in by_name:
                    raise ValueError(f"Zone '{zone.name}' couples to unknown zone '{neighbour}'")
                if neighbour == zone.name:
                    raise ValueError(f"Zone '{zone.name}' cannot couple to itself")
                mirror = by_name[neighbour].couplings.get(zone.name)
                if mirror is None:
                    by_name[neighbour].couplings[zone.name] = conductance
                elif mirror != conductance:
                    raise ValueError(
                        f"Asymmetric coupling: {zone.name}->{neighbour} = {conductance}, "
                        f"{neighbour}->{zone.name} = {mirror}"
                    )

    @property
    def zone_names(self) -> List[str]:
        return [zone.name for zone in self.zones]

    def zone(self, name: str) -> ZoneParams:
        for zone in self.zones:
            if zone.name == name:
                return zone
        raise KeyError(f"Unknown zone '{name}'")

    def thermal_network(self) -> Network:
        """Assemble the thermal RC network (see the module docstring for its topology)."""
        names, capacitance, links, ambient = [], [], [], []
        air_index, mass_index = {}, {}

        def add_node(label, cap, to_ambient=0.0):
            names.append(label)
            capacitance.append(cap)
            ambient.append(to_ambient)
            return len(names) - 1

        for zone in self.zones:
            air = add_node(f"{zone.name}.air", zone.air_capacitance, zone.ventilation_conductance)
            air_index[zone.name] = air
            for k, wall in enumerate(zone.walls):
                half = 2.0 / wall.resistance
                node = add_node(f"{zone.name}.wall{k}", wall.capacitance, half)
                links.append((air, node, half))
            if zone.has_mass:
                node = add_node(f"{zone.name}.mass", zone.mass_capacitance)
                links.append((air, node, 1.0 / zone.mass_resistance))
                mass_index[zone.name] = node

        done = set()
        for zone in self.zones:
            for neighbour, conductance in zone.couplings.items():
                key = tuple(sorted((zone.name, neighbour)))
                if key in done or conductance == 0:
                    continue
                done.add(key)
                links.append((air_index[zone.name], air_index[neighbour], conductance))

        return Network(names, capacitance, _laplacian(len(names), links), ambient,
                       air_index, mass_index)

    def moisture_network(self) -> Network:
        """Assemble the moisture network: air node per zone plus its hygric buffer."""
        names, capacitance, links, ambient = [], [], [], []
        air_index, buffer_index = {}, {}
        for zone in self.zones:
            names.append(f"{zone.name}.air")
            capacitance.append(zone.moisture_capacitance)
            ambient.append(zone.ventilation_mass_flow)
            air = len(names) - 1
            air_index[zone.name] = air
            if zone.has_buffer:
                names.append(f"{zone.name}.buffer")
                capacitance.append(zone.buffer_mass)
                ambient.append(0.0)
                buffer_index[zone.name] = len(names) - 1
                links.append((air, len(names) - 1, zone.buffer_exchange))
        return Network(names, capacitance, _laplacian(len(names), links), ambient,
                       air_index, buffer_index)


def _laplacian(size: int, links) -> np.ndarray:
    matrix = np.zeros((size, size))
    for i, j, conductance in links:
        matrix[i, i] += conductance
        matrix[j, j] += conductance
        matrix[i, j] -= conductance
        matrix[j, i] -= conductance
    return matrix
