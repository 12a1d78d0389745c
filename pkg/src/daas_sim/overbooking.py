"""Overbooked reservations and host capacity accounting."""

from __future__ import annotations

from dataclasses import dataclass

from .core import EPS, Host, LedgerError, ResourceError, ResourceVector, rv_fits, rv_sum


@dataclass(frozen=True)
class OverbookingPolicy:
    """``beta`` interpolates reservations between average (0) and worst case (1)."""

    beta: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta!r}")


def effective_reservation(
    avg: ResourceVector, worst: ResourceVector, policy: OverbookingPolicy
) -> ResourceVector:
    if not avg.le(worst):
        raise ResourceError(f"worst demand {worst} is below average demand {avg}")
    b = policy.beta
    # min() guards the upper bound against rounding in avg + b*(worst-avg).
    return ResourceVector(
        min(worst.cpu, avg.cpu + b * (worst.cpu - avg.cpu)),
        min(worst.mem, avg.mem + b * (worst.mem - avg.mem)),
    )


def free_capacity(host: Host) -> ResourceVector:
    cap, res = host.capacity, host.reserved
    if not res.le(cap, EPS):
        raise LedgerError(f"host {host.id}: reserved {res} exceeds capacity {cap}")
    return ResourceVector(max(0.0, cap.cpu - res.cpu), max(0.0, cap.mem - res.mem))


def reserve(host: Host, key: int, amount: ResourceVector) -> Host:
    """Add a reservation entry for ``key``; fails if it does not fit."""
    if key in host.reservations:
        raise LedgerError(f"host {host.id}: duplicate reservation for {key}")
    if not rv_fits(amount, free_capacity(host)):
        raise LedgerError(
            f"host {host.id}: cannot reserve {amount}, free {free_capacity(host)}"
        )
    host.reservations[key] = amount
    host.reserved = rv_sum(host.reservations.values())
    return host


def release(host: Host, key: int) -> ResourceVector:
    """Remove the reservation entry for ``key`` and return its amount."""
    try:
        amount = host.reservations.pop(key)
    except KeyError:
        raise LedgerError(f"host {host.id}: no reservation for {key}") from None
    host.reserved = rv_sum(host.reservations.values())
    return amount
