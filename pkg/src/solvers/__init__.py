from .mba import mba, rmba
from .oracle import ModelOracle
from .proximal import NoMajority, ensemble_failed, ensemble_select, epmba, neighbor_counts, pmba, rpmba
from .schedules import (
    Schedule,
    ScheduleRejected,
    schedule_convex,
    schedule_for,
    schedule_highprob,
    schedule_nonconvex,
    stage_count,
)
from .trace import ConvergenceRecord, ConvergenceTrace, StageRecord, TraceRecorder
