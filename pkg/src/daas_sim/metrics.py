"""Per-class and aggregate run metrics, and baseline-vs-IRA comparison."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

from .core import ResourceVector, rv_sum
from .engine import EventTrace, HostConfig, RequestOutcome, is_overloaded

DEFAULT_STRETCH_LIMIT = 1.5
LEVELS = range(1, 7)

METRICS_HEADER = (
    "run_id", "policy", "seed", "priority_class", "n_requests", "mean_wait_s", "p95_wait_s",
    "violations", "violation_rate", "reserved_util", "actual_util", "overload_time_frac",
)


class MetricsError(ValueError):
    pass


def wait_time(outcome: RequestOutcome) -> float:
    if outcome.start_time is None:
        raise MetricsError(f"request {outcome.request.id} never started")
    wait = outcome.start_time - outcome.request.arrival_time
    if wait < 0:
        raise MetricsError(f"request {outcome.request.id} started before it arrived")
    return wait


def is_violation(outcome: RequestOutcome, stretch_limit: float = DEFAULT_STRETCH_LIMIT,
                 deadline: float | None = None) -> bool:
    """Waited past the deadline, or ran slower than ``stretch_limit`` allows."""
    if outcome.finish_time is None:
        raise MetricsError(f"request {outcome.request.id} never finished")
    if deadline is None:
        deadline = outcome.request.deadline
    runtime = outcome.finish_time - outcome.start_time
    return wait_time(outcome) > deadline or runtime > stretch_limit * outcome.request.nominal_work


def nearest_rank(values: list[float], pct: float) -> float:
    if not values:
        return 0.0
    ordered = sorted(values)
    rank = max(1, math.ceil(pct / 100.0 * len(ordered)))
    return ordered[rank - 1]


def _host_segments(outcomes: list[RequestOutcome], capacity: ResourceVector):
    """Yield (t0, t1, reserved_frac, load) for each constant-membership interval."""
    changes: dict[float, list[tuple[int, RequestOutcome]]] = {}
    for o in outcomes:
        changes.setdefault(o.start_time, []).append((1, o))
        changes.setdefault(o.finish_time, []).append((-1, o))
    active: dict[int, RequestOutcome] = {}
    times = sorted(changes)
    for t0, t1 in zip(times, times[1:]):
        for sign, o in changes[t0]:
            if sign > 0:
                active[o.request.id] = o
            else:
                active.pop(o.request.id, None)
        if t1 <= t0 or not active:
            continue
        reserved = rv_sum(o.reservation for o in active.values()).bottleneck(capacity)
        load = rv_sum(o.actual_demand for o in active.values()).bottleneck(capacity)
        yield t0, t1, reserved, load


def _by_host(trace: EventTrace) -> dict[int, list[RequestOutcome]]:
    hosts: dict[int, list[RequestOutcome]] = {}
    for o in trace.outcomes:
        if o.host_id is not None:
            hosts.setdefault(o.host_id, []).append(o)
    return hosts


def utilization(trace: EventTrace) -> tuple[float, float]:
    """Time-weighted bottleneck (reserved, actual) utilization over [0, end]."""
    horizon = trace.end_time
    if horizon <= 0:
        return 0.0, 0.0
    cap = trace.hosts.capacity
    reserved_area, actual_area = [], []
    for outcomes in _by_host(trace).values():
        for t0, t1, reserved, load in _host_segments(outcomes, cap):
            reserved_area.append((t1 - t0) * reserved)
            actual_area.append((t1 - t0) * min(1.0, load))
    denom = trace.hosts.count * horizon
    return (min(1.0, math.fsum(reserved_area) / denom), min(1.0, math.fsum(actual_area) / denom))


def overload_time_fraction(trace: EventTrace) -> float:
    """Fraction of [0, end] during which at least one host was overloaded."""
    horizon = trace.end_time
    if horizon <= 0:
        return 0.0
    cap = trace.hosts.capacity
    intervals = sorted(
        (t0, t1)
        for outcomes in _by_host(trace).values()
        for t0, t1, _, load in _host_segments(outcomes, cap)
        if is_overloaded(load)
    )
    covered = []
    cur_start = cur_end = None
    for t0, t1 in intervals:
        if cur_end is None or t0 > cur_end:
            if cur_end is not None:
                covered.append(cur_end - cur_start)
            cur_start, cur_end = t0, t1
        else:
            cur_end = max(cur_end, t1)
    if cur_end is not None:
        covered.append(cur_end - cur_start)
    return min(1.0, math.fsum(covered) / horizon)


@dataclass(frozen=True)
class ClassMetrics:
    count: int
    mean_wait: float
    p95_wait: float
    violations: int
    violation_rate: float


@dataclass(frozen=True)
class AggregateMetrics:
    count: int
    mean_wait: float
    p95_wait: float
    violations: int
    violation_rate: float
    mean_reserved_utilization: float
    mean_actual_utilization: float
    overload_time_fraction: float
    hosts_used: int


@dataclass(frozen=True)
class RunMetrics:
    policy: str
    seed: int | None
    beta: float
    per_class: dict[int, ClassMetrics]
    aggregate: AggregateMetrics
    workload_digest: str = ""
    hosts: HostConfig | None = None

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "seed": self.seed,
            "beta": self.beta,
            "workload_digest": self.workload_digest,
            "per_class": {str(k): asdict(v) for k, v in self.per_class.items()},
            "aggregate": asdict(self.aggregate),
        }


def _class_stats(outcomes: list[RequestOutcome], stretch_limit: float):
    waits = [wait_time(o) for o in outcomes]
    violations = sum(is_violation(o, stretch_limit) for o in outcomes)
    count = len(outcomes)
    return (
        count,
        math.fsum(waits) / count if count else 0.0,
        nearest_rank(waits, 95),
        violations,
        violations / count if count else 0.0,
    )


def compute_metrics(trace: EventTrace, *, policy: str, seed: int | None = None, beta: float = 1.0,
                    stretch_limit: float = DEFAULT_STRETCH_LIMIT,
                    workload_digest: str = "") -> RunMetrics:
    groups: dict[int, list[RequestOutcome]] = {level: [] for level in LEVELS}
    for o in trace.outcomes:
        groups[o.priority.level].append(o)
    per_class = {level: ClassMetrics(*_class_stats(groups[level], stretch_limit)) for level in LEVELS}
    reserved_util, actual_util = utilization(trace)
    aggregate = AggregateMetrics(
        *_class_stats(trace.outcomes, stretch_limit),
        mean_reserved_utilization=reserved_util,
        mean_actual_utilization=actual_util,
        overload_time_fraction=overload_time_fraction(trace),
        hosts_used=len({o.host_id for o in trace.outcomes if o.host_id is not None}),
    )
    return RunMetrics(policy, seed, beta, per_class, aggregate, workload_digest, trace.hosts)


class ComparisonError(ValueError):
    pass


@dataclass(frozen=True)
class ComparisonReport:
    """Deltas are IRA minus baseline; negative numbers favour IRA."""

    per_class: dict[int, dict[str, float]]
    aggregate: dict[str, float]
    ira_high_priority_no_worse: bool

    def to_dict(self) -> dict:
        return {
            "per_class": {str(k): v for k, v in self.per_class.items()},
            "aggregate": self.aggregate,
            "ira_p1_p3_violation_rate_no_worse": self.ira_high_priority_no_worse,
        }


def compare(baseline: RunMetrics, ira: RunMetrics) -> ComparisonReport:
    if (baseline.seed, baseline.workload_digest, baseline.hosts) != (
        ira.seed, ira.workload_digest, ira.hosts
    ):
        raise ComparisonError("runs used different workloads or host configurations")
    per_class = {}
    for level in LEVELS:
        b, i = baseline.per_class[level], ira.per_class[level]
        per_class[level] = {
            "baseline_mean_wait": b.mean_wait,
            "ira_mean_wait": i.mean_wait,
            "delta_mean_wait": i.mean_wait - b.mean_wait,
            "baseline_violation_rate": b.violation_rate,
            "ira_violation_rate": i.violation_rate,
            "delta_violation_rate": i.violation_rate - b.violation_rate,
        }
    b, i = baseline.aggregate, ira.aggregate
    aggregate = {
        "delta_mean_wait": i.mean_wait - b.mean_wait,
        "delta_violation_rate": i.violation_rate - b.violation_rate,
        "delta_reserved_util": i.mean_reserved_utilization - b.mean_reserved_utilization,
        "delta_actual_util": i.mean_actual_utilization - b.mean_actual_utilization,
        "delta_overload_time_frac": i.overload_time_fraction - b.overload_time_fraction,
    }
    no_worse = all(
        ira.per_class[k].violation_rate <= baseline.per_class[k].violation_rate for k in (1, 2, 3)
    )
    return ComparisonReport(per_class, aggregate, no_worse)


def metrics_rows(run_id: str, m: RunMetrics) -> list[list[str]]:
    """CSV rows: one per priority class, then the ``ALL`` aggregate row.

    Utilization and overload are run-level quantities and are left blank on
    per-class rows.
    """
    seed = "" if m.seed is None else str(m.seed)
    rows = []
    for level in LEVELS:
        c = m.per_class[level]
        rows.append([run_id, m.policy, seed, str(level), str(c.count), repr(c.mean_wait),
                     repr(c.p95_wait), str(c.violations), repr(c.violation_rate), "", "", ""])
    a = m.aggregate
    rows.append([run_id, m.policy, seed, "ALL", str(a.count), repr(a.mean_wait), repr(a.p95_wait),
                 str(a.violations), repr(a.violation_rate), repr(a.mean_reserved_utilization),
                 repr(a.mean_actual_utilization), repr(a.overload_time_fraction)])
    return rows


def metrics_csv(runs: list[tuple[str, RunMetrics]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for run_id, m in runs:
        writer.writerows(metrics_rows(run_id, m))
    return buf.getvalue()
