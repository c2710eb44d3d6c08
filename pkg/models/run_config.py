"""Case-study constants and command-line run settings."""
from pathlib import Path
from typing import Any, Dict, List, Optional

from models.control import LoopTopology, OnOffSetpoints
from models.identification import IdentificationConfig

DEFAULT_CASE_ORDERS = {"I": 8, "II": 8, "III": 4, "IV": 4, "V": 8, "HAM": 6, "EXT": 4}


class CaseConfig:
    """
    Constants of the case-study pipelines.

    Attributes:
        building: Building to simulate; None loads data/building4.cfg
        zone (str): Zone whose T_i is identified and compared
        dt (float): Identification and application sample period (s)
        days (int): Length of each synthetic year
        start (str): Calendar start of the synthetic years (ISO date)
        identification_setpoints (OnOffSetpoints): S used to generate on/off identification data
        application_setpoints (OnOffSetpoints): Set points of the application runs
        transfer_setpoints (OnOffSetpoints): Identification set points S1 of the transfer case V
        orders (dict): Model order per case id
        sensor_noise (float): Std of the measurement noise added to the estimation-half T_i (degC)
        fine_factor (int): dt / fine dt for the fine-step case
        fine_start_day, fine_days (int): Window of the application year simulated at fine dt
        switch_deficit (float): Relative switching-rate deficit flagging missed fast dynamics
        sigma_ratio (float): Closed-loop sigma factor against the on/off-identified model at
            which case II reports missing transfer information
        ham_setpoints (OnOffSetpoints): Thermostat and humidistat of the HAM case
        ext_setpoints (OnOffSetpoints): Bands of the external-data application
        import_path (str or None): CSV export used by the EXT case; None exports the reference run
        identification (IdentificationConfig): Estimator settings (order overridden per case);
            defaults to pole reflection and refinement switched on
    """

    def __init__(
        self,
        building=None,
        zone: str = "zone1",
        dt: float = 3600.0,
        days: int = 365,
        start: str = "2021-01-01",
        identification_setpoints: Optional[OnOffSetpoints] = None,
        application_setpoints: Optional[OnOffSetpoints] = None,
        transfer_setpoints: Optional[OnOffSetpoints] = None,
        orders: Optional[Dict[str, int]] = None,
        sensor_noise: float = 0.001,
        fine_factor: int = 60,
        fine_start_day: int = 10,
        fine_days: int = 14,
        switch_deficit: float = 0.5,
        sigma_ratio: float = 1.5,
        ham_setpoints: Optional[OnOffSetpoints] = None,
        ext_setpoints: Optional[OnOffSetpoints] = None,
        import_path: Optional[str] = None,
        identification: Optional[IdentificationConfig] = None
    ):
        if not dt > 0:
            raise ValueError(f"Sample period must be positive, got {dt}")
        if days < 2:
            raise ValueError("A case needs at least two days of data")
        if sensor_noise < 0:
            raise ValueError("Sensor noise must be non-negative")
        if fine_factor < 1 or int(fine_factor) != fine_factor:
            raise ValueError(f"Fine-step factor must be a positive integer, got {fine_factor}")
        if fine_start_day < 0 or fine_days < 1 or fine_start_day + fine_days > days:
            raise ValueError("Fine-step window must lie inside the simulated year")
        if not 0 < switch_deficit < 1:
            raise ValueError("Switching deficit threshold must lie in (0, 1)")
        if not sigma_ratio > 0:
            raise ValueError(f"Sigma ratio limit must be positive, got {sigma_ratio}")

        self.building = building
        self.zone = zone
        self.dt = float(dt)
        self.days = int(days)
        self.start = start
        self.identification_setpoints = identification_setpoints or OnOffSetpoints(18.0, 22.0)
        self.application_setpoints = application_setpoints or OnOffSetpoints(18.0, 22.0)
        self.transfer_setpoints = transfer_setpoints or OnOffSetpoints(21.0, 22.0)
        self.orders = dict(DEFAULT_CASE_ORDERS)
        self.orders.update(orders or {})
        self.sensor_noise = float(sensor_noise)
        self.fine_factor = int(fine_factor)
        self.fine_start_day = int(fine_start_day)
        self.fine_days = int(fine_days)
        self.switch_deficit = float(switch_deficit)
        self.sigma_ratio = float(sigma_ratio)
        self.ham_setpoints = ham_setpoints or OnOffSetpoints(18.0, 22.0, 35.0, 65.0)
        self.ext_setpoints = ext_setpoints or OnOffSetpoints(12.0, 20.0)
        self.import_path = import_path
        self.identification = identification or IdentificationConfig(stabilize=True, refine=True)

    def order_for(self, case_id: str) -> int:
        return int(self.orders[case_id])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "zone": self.zone,
            "dt": self.dt,
            "days": self.days,
            "start": self.start,
            "identification_setpoints": self.identification_setpoints.to_dict(),
            "application_setpoints": self.application_setpoints.to_dict(),
            "transfer_setpoints": self.transfer_setpoints.to_dict(),
            "orders": self.orders,
            "sensor_noise": self.sensor_noise,
            "fine_factor": self.fine_factor,
            "fine_window_days": [self.fine_start_day, self.fine_start_day + self.fine_days],
            "switch_deficit": self.switch_deficit,
            "sigma_ratio": self.sigma_ratio,
        }


class RunConfig:
    """
    Paths and flags of one command-line invocation.

    Paths are checked by check_paths() when the command runs, not at parse time,
    so a config can be built before its inputs are generated.
    """

    def __init__(
        self,
        out_dir: str = ".",
        seed: int = 0,
        dt: Optional[float] = None,
        orders: Optional[List[int]] = None,
        setpoints: Optional[OnOffSetpoints] = None,
        topology: LoopTopology = LoopTopology.HVAC_SEPARATE_INPUT,
        building_path: Optional[str] = None,
        input_paths: Optional[List[str]] = None,
        cases: Optional[List[str]] = None,
        workers: int = 1
    ):
        if dt is not None and not dt > 0:
            raise ValueError(f"--dt must be positive, got {dt}")
        if orders is not None and any(order < 1 for order in orders):
            raise ValueError(f"Model orders must be at least 1, got {orders}")
        if workers < 1:
            raise ValueError("--workers must be at least 1")
        self.out_dir = Path(out_dir)
        self.seed = int(seed)
        self.dt = dt
        self.orders = list(orders) if orders is not None else None
        self.setpoints = setpoints
        self.topology = topology
        self.building_path = building_path
        self.input_paths = list(input_paths or [])
        self.cases = list(cases or [])
        self.workers = int(workers)

    def check_paths(self) -> None:
        """
        Raises:
            FileNotFoundError: If a referenced input file is missing
        """
        for path in [self.building_path, *self.input_paths]:
            if path is not None and not Path(path).is_file():
                raise FileNotFoundError(f"Input file not found: {path}")

    def output_path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name
