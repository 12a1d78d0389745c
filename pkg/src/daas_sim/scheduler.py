"""Resource manager: first-fit placement, pending queue and dispatch disciplines."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass

from .core import Host, PriorityClass, Request, ResourceVector, rv_fits
from .overbooking import OverbookingPolicy, effective_reservation, free_capacity, reserve


class Discipline(enum.Enum):
    FIFO_BASELINE = "fifo"
    IRA_PRIORITY = "ira"


class Placement(enum.Enum):
    FIRST_FIT = "first_fit"


@dataclass(frozen=True)
class SchedulerPolicy:
    discipline: Discipline = Discipline.IRA_PRIORITY
    placement: Placement = Placement.FIRST_FIT


class QueueError(ValueError):
    pass


@dataclass(frozen=True)
class QueueEntry:
    request: Request
    priority: PriorityClass
    enqueue_time: float
    seq: int


class PendingQueue:
    """Requests waiting for capacity.

    FIFO pops by insertion order; IRA pops by priority level, then insertion
    order. Neither discipline lets a later entry overtake the head.
    """

    def __init__(self, discipline: Discipline) -> None:
        self.discipline = discipline
        self._heap: list[tuple[tuple[int, ...], QueueEntry]] = []
        self._ids: set[int] = set()
        self._seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, request_id: int) -> bool:
        return request_id in self._ids

    def _key(self, entry: QueueEntry) -> tuple[int, ...]:
        if self.discipline is Discipline.IRA_PRIORITY:
            return (entry.priority.level, entry.seq)
        return (entry.seq,)

    def enqueue(self, request: Request, priority: PriorityClass, now: float) -> QueueEntry:
        if request.id in self._ids:
            raise QueueError(f"request {request.id} is already queued")
        entry = QueueEntry(request, priority, now, self._seq)
        self._seq += 1
        heapq.heappush(self._heap, (self._key(entry), entry))
        self._ids.add(request.id)
        return entry

    def peek(self) -> QueueEntry | None:
        return self._heap[0][1] if self._heap else None

    def pop(self) -> QueueEntry:
        _, entry = heapq.heappop(self._heap)
        self._ids.discard(entry.request.id)
        return entry

    def pop_order(self) -> list[QueueEntry]:
        """Entries in the order they would be popped, without mutating the queue."""
        return [entry for _, entry in sorted(self._heap)]


def select_host(hosts: list[Host], need: ResourceVector) -> int | None:
    """Index of the first host whose free capacity covers ``need``."""
    for index, host in enumerate(hosts):
        if rv_fits(need, free_capacity(host)):
            return index
    return None


@dataclass
class PlacementDecision:
    entry: QueueEntry
    host_index: int
    reservation: ResourceVector


def dispatch(
    queue: PendingQueue, hosts: list[Host], obp: OverbookingPolicy
) -> list[PlacementDecision]:
    """Place queue entries in discipline order until the head cannot be placed.

    Each placement reserves the effective reservation on the chosen host.
    """
    placements = []
    while len(queue):
        entry = queue.peek()
        req = entry.request
        need = effective_reservation(req.avg_demand, req.worst_demand, obp)
        index = select_host(hosts, need)
        if index is None:
            break
        queue.pop()
        reserve(hosts[index], req.id, need)
        placements.append(PlacementDecision(entry, index, need))
    return placements
