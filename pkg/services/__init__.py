"""Services for building system identification."""
from .signal_service import ZeroPowerSignal
from .identification_service import (
    IdentificationError,
    InsufficientExcitation,
    NonConvergence,
    RankDeficient,
    DtMismatch,
    LogUndefined,
)
from .control_service import TopologyMismatch
from .reference_simulator import ReferenceSimulator, InstabilityDetected
from .validation_service import GridMismatch
from .case_study_service import CaseStudyService

__all__ = [
    'ZeroPowerSignal',
    'IdentificationError',
    'InsufficientExcitation',
    'NonConvergence',
    'RankDeficient',
    'DtMismatch',
    'LogUndefined',
    'TopologyMismatch',
    'ReferenceSimulator',
    'InstabilityDetected',
    'GridMismatch',
    'CaseStudyService',
]
