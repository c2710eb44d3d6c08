"""Domain models for building system identification."""
from .time_series import TimeSeries, SignalDiagnostics, Spectrum
from .state_space_model import StateSpaceModel
from .output_error_model import OEChannel, OutputErrorModel
from .identification import IdentificationConfig, FitReport, OrderSweepRow
from .building import Building, HvacConfig, WallBranch, ZoneParams
from .climate import Climate
from .control import OnOffSetpoints, LoopTopology, OnOffController, FREE_FLOAT
from .sim_result import SimResult, ZoneTrace
from .reports import ComparisonReport, GateResult, Limitation, CaseVerdict, SweepRow, TimingReport
from .run_config import CaseConfig, RunConfig

__all__ = [
    'TimeSeries', 'SignalDiagnostics', 'Spectrum',
    'StateSpaceModel', 'OEChannel', 'OutputErrorModel',
    'IdentificationConfig', 'FitReport', 'OrderSweepRow',
    'Building', 'HvacConfig', 'WallBranch', 'ZoneParams',
    'Climate',
    'OnOffSetpoints', 'LoopTopology', 'OnOffController', 'FREE_FLOAT',
    'SimResult', 'ZoneTrace',
    'ComparisonReport', 'GateResult', 'Limitation', 'CaseVerdict', 'SweepRow', 'TimingReport',
    'CaseConfig', 'RunConfig',
]
