"""Seeded synthetic workloads: Poisson arrivals, exponential work, uniform demands."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .core import Request, ResourceVector
from .priority import profile

# Substream indices under the run seed.
_ARRIVALS, _DEMANDS, _WORK, _CLASSES, _ACTUAL = range(5)

DEFAULT_DEADLINES = (30.0, 45.0, 60.0, 90.0, 120.0, 180.0)


class WorkloadError(ValueError):
    pass


def _check_range(name: str, rng: tuple[float, float], low: float = 0.0) -> None:
    lo, hi = rng
    if not (low <= lo <= hi) or not math.isfinite(hi):
        raise WorkloadError(f"{name}: expected {low} <= min <= max, got {rng}")


@dataclass(frozen=True)
class WorkloadSpec:
    n_requests: int = 600
    arrival_rate: float = 1.92
    work_mean: float = 10.0
    avg_cpu_range: tuple[float, float] = (1.0, 3.0)
    avg_mem_range: tuple[float, float] = (1.0, 3.0)
    uplift_cpu_range: tuple[float, float] = (0.0, 1.0)
    uplift_mem_range: tuple[float, float] = (0.0, 1.0)
    deadlines: tuple[float, ...] = DEFAULT_DEADLINES
    class_mix: tuple[float, ...] = (1 / 6,) * 6
    seed: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.n_requests, int) or self.n_requests < 0:
            raise WorkloadError(f"n_requests must be a non-negative integer, got {self.n_requests!r}")
        if not self.arrival_rate > 0:
            raise WorkloadError("arrival_rate must be positive")
        if not self.work_mean > 0:
            raise WorkloadError("work_mean must be positive")
        _check_range("avg_cpu_range", self.avg_cpu_range)
        _check_range("avg_mem_range", self.avg_mem_range)
        _check_range("uplift_cpu_range", self.uplift_cpu_range)
        _check_range("uplift_mem_range", self.uplift_mem_range)
        if len(self.deadlines) != 6 or any(not d > 0 for d in self.deadlines):
            raise WorkloadError("deadlines must be six positive values")
        if len(self.class_mix) != 6 or any(w < 0 for w in self.class_mix):
            raise WorkloadError("class_mix must be six non-negative weights")
        if abs(math.fsum(self.class_mix) - 1.0) > 1e-9:
            raise WorkloadError(f"class_mix must sum to 1, got {math.fsum(self.class_mix)!r}")


def _streams(seed: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(5)
    return [np.random.default_rng(c) for c in children]


def generate_workload(spec: WorkloadSpec) -> list[Request]:
    """Requests in arrival order. Identical specs give identical lists."""
    n = spec.n_requests
    if n == 0:
        return []
    arrivals_rng, demand_rng, work_rng, class_rng, _ = _streams(spec.seed)

    arrivals = np.cumsum(arrivals_rng.exponential(1.0 / spec.arrival_rate, n))
    classes = class_rng.choice(6, size=n, p=np.asarray(spec.class_mix) / math.fsum(spec.class_mix))
    work = work_rng.exponential(spec.work_mean, n)
    avg_cpu = demand_rng.uniform(*spec.avg_cpu_range, n)
    avg_mem = demand_rng.uniform(*spec.avg_mem_range, n)
    up_cpu = demand_rng.uniform(*spec.uplift_cpu_range, n)
    up_mem = demand_rng.uniform(*spec.uplift_mem_range, n)

    requests = []
    for i in range(n):
        level = int(classes[i]) + 1
        avg = ResourceVector(float(avg_cpu[i]), float(avg_mem[i]))
        requests.append(
            Request(
                id=i,
                user_id=i,
                arrival_time=float(arrivals[i]),
                sla=profile(level),
                avg_demand=avg,
                worst_demand=ResourceVector(
                    avg.cpu * (1.0 + float(up_cpu[i])), avg.mem * (1.0 + float(up_mem[i]))
                ),
                # exponential() can return exactly 0 with negligible probability
                nominal_work=max(float(work[i]), 1e-12),
                deadline=spec.deadlines[level - 1],
            )
        )
    return requests


class UniformActualDemand:
    """Actual demand drawn uniformly in [avg, worst] per component.

    Each request gets its own substream keyed by its id, so the draw does not
    depend on scheduling order and is shared by every policy run on a workload.
    """

    def __init__(self, seed: int) -> None:
        self.seed = seed

    def __call__(self, request: Request) -> ResourceVector:
        ss = np.random.SeedSequence(self.seed, spawn_key=(_ACTUAL, request.id))
        u_cpu, u_mem = np.random.default_rng(ss).random(2)
        avg, worst = request.avg_demand, request.worst_demand
        return ResourceVector(
            min(worst.cpu, avg.cpu + float(u_cpu) * (worst.cpu - avg.cpu)),
            min(worst.mem, avg.mem + float(u_mem) * (worst.mem - avg.mem)),
        )


def workload_digest(requests: list[Request]) -> str:
    """Stable hash of a request list, used to prove two runs shared a workload."""
    h = hashlib.sha256()
    for r in requests:
        h.update(repr(r).encode())
        h.update(b"\n")
    return h.hexdigest()


def offered_load(spec: WorkloadSpec, capacity_cpu: float, capacity_mem: float, n_hosts: int,
                 beta: float) -> float:
    """Reserved work arriving per unit time relative to total capacity.

    Uses the mean reservation per component under ``beta`` and takes the larger
    of the two per-component ratios.
    """
    def mean_reservation(avg_range, uplift_range) -> float:
        mean_avg = sum(avg_range) / 2.0
        mean_uplift = sum(uplift_range) / 2.0
        return mean_avg * (1.0 + beta * mean_uplift)

    cpu = mean_reservation(spec.avg_cpu_range, spec.uplift_cpu_range) / (capacity_cpu * n_hosts)
    mem = mean_reservation(spec.avg_mem_range, spec.uplift_mem_range) / (capacity_mem * n_hosts)
    return spec.arrival_rate * spec.work_mean * max(cpu, mem)
