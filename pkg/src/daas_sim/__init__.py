"""Discrete-event simulator for SLA-priority resource allocation on DaaS hosts."""

from .core import (
    Host,
    PriorityClass,
    Request,
    ResourceVector,
    RunningApp,
    SlaFactors,
    rv_add,
    rv_fits,
)
from .engine import EventTrace, HostConfig, SimulationError, simulate
from .experiment import run
from .metrics import RunMetrics, compare, compute_metrics
from .overbooking import OverbookingPolicy, effective_reservation, free_capacity
from .priority import PRIORITY_TABLE, classify
from .scheduler import Discipline, PendingQueue, SchedulerPolicy, dispatch, select_host
from .workload import WorkloadSpec, generate_workload

__version__ = "0.1.0"

__all__ = [
    "Discipline", "EventTrace", "Host", "HostConfig", "OverbookingPolicy", "PRIORITY_TABLE",
    "PendingQueue", "PriorityClass", "Request", "ResourceVector", "RunMetrics", "RunningApp",
    "SchedulerPolicy", "SimulationError", "SlaFactors", "WorkloadSpec", "classify", "compare",
    "compute_metrics", "dispatch", "effective_reservation", "free_capacity", "generate_workload",
    "rv_add", "rv_fits", "run", "select_host", "simulate",
]
