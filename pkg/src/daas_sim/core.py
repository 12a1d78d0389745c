"""Domain types: resource vectors, SLA factors, priority classes, requests, hosts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# Absolute tolerance for capacity comparisons and timestamp equality.
EPS = 1e-9


class ResourceError(ValueError):
    """Raised on invalid resource arithmetic (negative components, underflow)."""


class InvalidRequestError(ValueError):
    """Raised when a request violates its construction invariants."""


class LedgerError(RuntimeError):
    """Raised when a host reservation ledger is inconsistent or overdrawn."""


@dataclass(frozen=True)
class ResourceVector:
    """Two-dimensional resource quantity in abstract CPU and memory units."""

    cpu: float = 0.0
    mem: float = 0.0

    def __post_init__(self) -> None:
        for name in ("cpu", "mem"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ResourceError(f"{name} must be finite and >= 0, got {value!r}")

    def __add__(self, other: ResourceVector) -> ResourceVector:
        return ResourceVector(self.cpu + other.cpu, self.mem + other.mem)

    def __sub__(self, other: ResourceVector) -> ResourceVector:
        cpu = self.cpu - other.cpu
        mem = self.mem - other.mem
        if cpu < 0 or mem < 0:
            raise ResourceError(f"subtraction underflow: {self} - {other}")
        return ResourceVector(cpu, mem)

    def scale(self, factor: float) -> ResourceVector:
        return ResourceVector(self.cpu * factor, self.mem * factor)

    def le(self, other: ResourceVector, tol: float = 0.0) -> bool:
        """Component-wise ``self <= other`` with an absolute slack."""
        return self.cpu <= other.cpu + tol and self.mem <= other.mem + tol

    def bottleneck(self, capacity: ResourceVector) -> float:
        """Largest per-component fraction of ``capacity`` this vector occupies."""
        return max(self.cpu / capacity.cpu, self.mem / capacity.mem)

    def as_tuple(self) -> tuple[float, float]:
        return (self.cpu, self.mem)


ZERO = ResourceVector(0.0, 0.0)


def rv_add(a: ResourceVector, b: ResourceVector) -> ResourceVector:
    return a + b


def rv_fits(need: ResourceVector, free: ResourceVector) -> bool:
    """True iff ``need`` fits into ``free`` in every component."""
    return need.le(free, EPS)


def rv_sum(vectors) -> ResourceVector:
    """Order-independent exact-rounded sum; keeps host ledgers free of drift."""
    vectors = list(vectors)
    return ResourceVector(
        math.fsum(v.cpu for v in vectors), math.fsum(v.mem for v in vectors)
    )


SLA_FACTOR_NAMES = ("throughput", "reliability", "durability", "agility", "security")


@dataclass(frozen=True)
class SlaFactors:
    """Which SLA factors a request requires."""

    throughput: bool = False
    reliability: bool = False
    durability: bool = False
    agility: bool = False
    security: bool = False

    @classmethod
    def from_names(cls, names) -> SlaFactors:
        names = set(names)
        unknown = names - set(SLA_FACTOR_NAMES)
        if unknown:
            raise ValueError(f"unknown SLA factors: {sorted(unknown)}")
        return cls(**{n: True for n in names})

    def required(self) -> frozenset[str]:
        return frozenset(n for n in SLA_FACTOR_NAMES if getattr(self, n))


@dataclass(frozen=True, order=True)
class PriorityClass:
    """Priority level 1 (highest) to 6 (lowest)."""

    level: int

    def __post_init__(self) -> None:
        if not isinstance(self.level, int) or not 1 <= self.level <= 6:
            raise ValueError(f"priority level must be an integer in 1..6, got {self.level!r}")

    def outranks(self, other: PriorityClass) -> bool:
        return self.level < other.level

    def __str__(self) -> str:
        return f"P{self.level}"


@dataclass(frozen=True)
class Request:
    """An application-execution request.

    ``nominal_work`` is the work completed at rate 1.0 (the app receives its full
    actual demand); ``deadline`` is the longest tolerated wait before starting.
    """

    id: int
    user_id: int
    arrival_time: float
    sla: SlaFactors
    avg_demand: ResourceVector
    worst_demand: ResourceVector
    nominal_work: float
    deadline: float

    def __post_init__(self) -> None:
        if not self.avg_demand.le(self.worst_demand):
            raise InvalidRequestError(
                f"request {self.id}: worst_demand {self.worst_demand} < avg_demand {self.avg_demand}"
            )
        if not (self.nominal_work > 0 and math.isfinite(self.nominal_work)):
            raise InvalidRequestError(f"request {self.id}: nominal_work must be > 0")
        if not (self.deadline > 0):
            raise InvalidRequestError(f"request {self.id}: deadline must be > 0")
        if not (self.arrival_time >= 0 and math.isfinite(self.arrival_time)):
            raise InvalidRequestError(f"request {self.id}: arrival_time must be >= 0")


@dataclass
class RunningApp:
    request_id: int
    actual_demand: ResourceVector
    effective_reservation: ResourceVector
    start_time: float
    remaining_work: float
    last_progress_update: float
    work_done: float = 0.0
    generation: int = 0


@dataclass
class Host:
    """A datacenter host with an exact reservation ledger.

    ``reserved`` is always recomputed from the per-request entries, so it cannot
    drift from the sum of admitted reservations.
    """

    id: int
    capacity: ResourceVector
    reservations: dict[int, ResourceVector] = field(default_factory=dict)
    running: dict[int, RunningApp] = field(default_factory=dict)
    reserved: ResourceVector = ZERO

    def __post_init__(self) -> None:
        if self.capacity.cpu <= 0 or self.capacity.mem <= 0:
            raise ResourceError(f"host {self.id}: capacity must be positive, got {self.capacity}")
        self.reserved = rv_sum(self.reservations.values())

    def actual_load(self) -> float:
        """Bottleneck load factor: max over components of total actual use / capacity."""
        if not self.running:
            return 0.0
        total = rv_sum(app.actual_demand for app in self.running.values())
        return total.bottleneck(self.capacity)
