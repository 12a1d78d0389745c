"""Deterministic discrete-event engine with processor-sharing overload."""

from __future__ import annotations

import enum
import heapq
import io
from dataclasses import dataclass, field
from typing import Callable

from .core import EPS, Host, PriorityClass, Request, ResourceVector, RunningApp, rv_sum
from .overbooking import OverbookingPolicy, effective_reservation, release
from .priority import classify
from .scheduler import PendingQueue, SchedulerPolicy, dispatch

DemandModel = Callable[[Request], ResourceVector]

TRACE_HEADER = "time,event_kind,request_id,host_id,priority"


class SimulationError(RuntimeError):
    """An engine invariant was breached; ``event_index`` locates the event."""

    def __init__(self, message: str, event_index: int | None = None) -> None:
        self.event_index = event_index
        where = f" at event {event_index}" if event_index is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class HostConfig:
    count: int = 4
    capacity: ResourceVector = ResourceVector(8.0, 8.0)

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("at least one host is required")
        if self.capacity.cpu <= 0 or self.capacity.mem <= 0:
            raise ValueError("host capacity must be positive")

    def build(self) -> list[Host]:
        return [Host(i, self.capacity) for i in range(self.count)]


class EventKind(enum.Enum):
    ARRIVAL = "ARRIVAL"
    FINISH = "FINISH"


@dataclass(frozen=True, order=True)
class SimEvent:
    time: float
    seq: int
    kind: EventKind = field(compare=False)
    request_id: int = field(compare=False)
    host_id: int = field(default=-1, compare=False)
    generation: int = field(default=0, compare=False)


class EventQueue:
    """Min-heap of events ordered by (time, seq); seq increases per insertion."""

    def __init__(self) -> None:
        self._heap: list[SimEvent] = []
        self._seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, time: float, kind: EventKind, request_id: int, host_id: int = -1,
             generation: int = 0) -> SimEvent:
        event = SimEvent(time, self._seq, kind, request_id, host_id, generation)
        self._seq += 1
        heapq.heappush(self._heap, event)
        return event

    def peek_time(self) -> float:
        return self._heap[0].time

    def pop(self) -> SimEvent:
        return heapq.heappop(self._heap)


@dataclass(frozen=True)
class TraceRecord:
    time: float
    kind: str
    request_id: int
    host_id: int | None
    priority: int

    def to_line(self) -> str:
        host = "" if self.host_id is None else str(self.host_id)
        return f"{self.time!r},{self.kind},{self.request_id},{host},{self.priority}"


@dataclass
class RequestOutcome:
    request: Request
    priority: PriorityClass
    host_id: int | None = None
    start_time: float | None = None
    finish_time: float | None = None
    reservation: ResourceVector | None = None
    actual_demand: ResourceVector | None = None
    work_done: float = 0.0


@dataclass
class EventTrace:
    records: list[TraceRecord] = field(default_factory=list)
    outcomes: list[RequestOutcome] = field(default_factory=list)
    hosts: HostConfig = field(default_factory=HostConfig)
    end_time: float = 0.0

    def placements(self) -> list[tuple[int, int]]:
        """(request_id, host_id) in start order."""
        return [(r.request_id, r.host_id) for r in self.records if r.kind == "START"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(TRACE_HEADER + "\n")
        for rec in self.records:
            buf.write(rec.to_line() + "\n")
        return buf.getvalue()


def is_overloaded(load: float) -> bool:
    # EPS absorbs rounding when reservations sum to exactly the capacity.
    return load > 1.0 + EPS


def progress_rate(host: Host) -> float:
    """Rate every app on ``host`` progresses at: 1, or 1/L when overloaded."""
    load = host.actual_load()
    return 1.0 / load if is_overloaded(load) else 1.0


def progress_update(host: Host, t_from: float, t_to: float) -> dict[int, RunningApp]:
    """Advance every running app on ``host`` across an interval with fixed membership."""
    if t_to < t_from:
        raise SimulationError(f"host {host.id}: progress interval runs backwards ({t_from} > {t_to})")
    if t_to == t_from:
        return host.running
    rate = progress_rate(host)
    done = (t_to - t_from) * rate
    for app in host.running.values():
        remaining = app.remaining_work - done
        if remaining < 0:
            slack = EPS * max(1.0, app.remaining_work + app.work_done)
            if remaining < -slack:
                raise SimulationError(
                    f"request {app.request_id}: remaining work went negative ({remaining!r})"
                )
            remaining = 0.0
        app.remaining_work = remaining
        app.work_done += done
        app.last_progress_update = t_to
    return host.running


def _check_actual(req: Request, actual: ResourceVector) -> None:
    if not (req.avg_demand.le(actual, EPS) and actual.le(req.worst_demand, EPS)):
        raise SimulationError(
            f"request {req.id}: actual demand {actual} outside [{req.avg_demand}, {req.worst_demand}]"
        )


class Simulation:
    """One simulation run over a fixed request list. Single-use."""

    def __init__(self, requests: list[Request], hosts: HostConfig, policy: SchedulerPolicy,
                 obp: OverbookingPolicy, demand_model: DemandModel | None = None) -> None:
        self.requests = {r.id: r for r in requests}
        if len(self.requests) != len(requests):
            raise SimulationError("duplicate request ids in workload")
        self.host_config = hosts
        self.hosts = hosts.build()
        self.obp = obp
        self.queue = PendingQueue(policy.discipline)
        self.demand_model = demand_model or (lambda r: r.worst_demand)
        self.events = EventQueue()
        self.clock = 0.0
        self.event_index = 0
        self.trace = EventTrace(hosts=hosts)
        self.outcomes = {r.id: RequestOutcome(r, classify(r.sla)) for r in requests}
        self.trace.outcomes = [self.outcomes[r.id] for r in requests]
        self._last_update = [0.0] * len(self.hosts)

        for r in requests:
            need = effective_reservation(r.avg_demand, r.worst_demand, obp)
            if not need.le(hosts.capacity, EPS):
                raise SimulationError(
                    f"request {r.id}: reservation {need} exceeds host capacity {hosts.capacity}"
                )
            self.events.push(r.arrival_time, EventKind.ARRIVAL, r.id)

    def _record(self, kind: str, request_id: int, host_id: int | None) -> None:
        prio = self.outcomes[request_id].priority.level
        self.trace.records.append(TraceRecord(self.clock, kind, request_id, host_id, prio))

    def _advance(self, index: int) -> None:
        host = self.hosts[index]
        progress_update(host, self._last_update[index], self.clock)
        self._last_update[index] = self.clock

    def _reschedule(self, index: int) -> None:
        host = self.hosts[index]
        stretch = 1.0 / progress_rate(host)
        for app in host.running.values():
            app.generation += 1
            self.events.push(self.clock + app.remaining_work * stretch, EventKind.FINISH,
                             app.request_id, index, app.generation)

    def _on_arrival(self, event: SimEvent) -> None:
        outcome = self.outcomes[event.request_id]
        self._record("ARRIVAL", event.request_id, None)
        self.queue.enqueue(outcome.request, outcome.priority, self.clock)

    def _on_finish(self, event: SimEvent, app: RunningApp) -> None:
        host = self.hosts[event.host_id]
        self._advance(event.host_id)
        nominal = self.outcomes[app.request_id].request.nominal_work
        if abs(app.work_done - nominal) > EPS * nominal:
            raise SimulationError(
                f"request {app.request_id}: work done {app.work_done!r} != nominal {nominal!r}",
                self.event_index,
            )
        app.remaining_work = 0.0
        del host.running[app.request_id]
        release(host, app.request_id)
        outcome = self.outcomes[app.request_id]
        outcome.finish_time = self.clock
        outcome.work_done = app.work_done
        self._record("FINISH", app.request_id, event.host_id)
        self._reschedule(event.host_id)

    def _start_placements(self) -> None:
        touched = []
        for placement in dispatch(self.queue, self.hosts, self.obp):
            req = placement.entry.request
            index = placement.host_index
            if index not in touched:
                self._advance(index)
                touched.append(index)
            actual = self.demand_model(req)
            _check_actual(req, actual)
            self.hosts[index].running[req.id] = RunningApp(
                request_id=req.id,
                actual_demand=actual,
                effective_reservation=placement.reservation,
                start_time=self.clock,
                remaining_work=req.nominal_work,
                last_progress_update=self.clock,
            )
            outcome = self.outcomes[req.id]
            outcome.host_id = index
            outcome.start_time = self.clock
            outcome.reservation = placement.reservation
            outcome.actual_demand = actual
            self._record("START", req.id, index)
        for index in touched:
            self._reschedule(index)

    def _check_invariants(self) -> None:
        for host in self.hosts:
            if not host.reserved.le(host.capacity, EPS):
                raise SimulationError(
                    f"host {host.id}: reserved {host.reserved} exceeds capacity {host.capacity}",
                    self.event_index,
                )
            if host.reserved != rv_sum(host.reservations.values()):
                raise SimulationError(f"host {host.id}: reservation ledger drifted", self.event_index)
            if host.reservations.keys() != host.running.keys():
                raise SimulationError(f"host {host.id}: ledger/running mismatch", self.event_index)

    def run(self) -> EventTrace:
        events = self.events
        while len(events):
            batch_start = events.peek_time()
            while len(events) and events.peek_time() <= batch_start + EPS:
                event = events.pop()
                if event.time < self.clock:
                    raise SimulationError(
                        f"clock moved backwards ({event.time!r} < {self.clock!r})", self.event_index
                    )
                if event.kind is EventKind.ARRIVAL:
                    self.clock = event.time
                    self._on_arrival(event)
                else:
                    app = self.hosts[event.host_id].running.get(event.request_id)
                    if app is None or app.generation != event.generation:
                        continue
                    self.clock = event.time
                    self._on_finish(event, app)
                self.event_index += 1
            self._start_placements()
            self._check_invariants()

        self.trace.end_time = self.clock
        started = sum(o.start_time is not None for o in self.trace.outcomes)
        finished = sum(o.finish_time is not None for o in self.trace.outcomes)
        n = len(self.trace.outcomes)
        if not (started == finished == n) or len(self.queue):
            raise SimulationError(
                f"incomplete run: {started} started, {finished} finished, {n} requests",
                self.event_index,
            )
        return self.trace


def simulate(requests: list[Request], hosts: HostConfig, policy: SchedulerPolicy,
             obp: OverbookingPolicy, demand_model: DemandModel | None = None) -> EventTrace:
    """Run a fixed request list to completion.

    Without a ``demand_model`` every app consumes its worst-case demand.
    """
    return Simulation(requests, hosts, policy, obp, demand_model).run()
