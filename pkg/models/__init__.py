from .core import (
    UNITS_LINE, PoleClass, SquareWell, PiecewiseConstant, Sampled, PotentialSpec,
    check_l, check_momentum, classify, energy, mirror
)
from .models import (
    ComplexValue, ScanRegion, RegulatorSchedule, Sweep, RunConfig,
    PoleRecordOut, PoleReport, EpsilonRow, PseudonormReport,
    JostGridRow, JostGridReport, TrajectoryRow, BranchOut, TrajectoryReport
)

__all__ = [
    'UNITS_LINE', 'PoleClass', 'SquareWell', 'PiecewiseConstant', 'Sampled', 'PotentialSpec',
    'check_l', 'check_momentum', 'classify', 'energy', 'mirror',
    'ComplexValue', 'ScanRegion', 'RegulatorSchedule', 'Sweep', 'RunConfig',
    'PoleRecordOut', 'PoleReport', 'EpsilonRow', 'PseudonormReport',
    'JostGridRow', 'JostGridReport', 'TrajectoryRow', 'BranchOut', 'TrajectoryReport'
]
