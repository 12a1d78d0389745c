"""Run a generated workload end to end and collect metrics."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Request
from .engine import EventTrace, HostConfig, simulate
from .metrics import DEFAULT_STRETCH_LIMIT, RunMetrics, compute_metrics
from .overbooking import OverbookingPolicy
from .scheduler import SchedulerPolicy
from .workload import UniformActualDemand, WorkloadSpec, generate_workload, workload_digest


@dataclass
class RunResult:
    requests: list[Request]
    trace: EventTrace
    metrics: RunMetrics


def run(spec: WorkloadSpec, hosts: HostConfig, policy: SchedulerPolicy, obp: OverbookingPolicy,
        stretch_limit: float = DEFAULT_STRETCH_LIMIT,
        requests: list[Request] | None = None) -> RunResult:
    """Generate the workload for ``spec`` (unless given) and simulate it."""
    if requests is None:
        requests = generate_workload(spec)
    trace = simulate(requests, hosts, policy, obp, UniformActualDemand(spec.seed))
    metrics = compute_metrics(
        trace,
        policy=policy.discipline.value,
        seed=spec.seed,
        beta=obp.beta,
        stretch_limit=stretch_limit,
        workload_digest=workload_digest(requests),
    )
    return RunResult(requests, trace, metrics)
