"""Cyclical hyper-parameter training: schedules, controllers, a small
from-scratch trainer and an experiment harness."""

from .controllers import (
    ControllerRanges,
    ControllerSet,
    CyclicalRange,
    hp_ratio,
    ratio_in_range,
    resolve_epoch,
)
from .schedule import CyclicalSchedule, blend, blend_values, cycle_coefficient, schedule_trace

__version__ = "0.1.0"

__all__ = [
    "ControllerRanges",
    "ControllerSet",
    "CyclicalRange",
    "CyclicalSchedule",
    "blend",
    "blend_values",
    "cycle_coefficient",
    "hp_ratio",
    "ratio_in_range",
    "resolve_epoch",
    "schedule_trace",
    "__version__",
]
