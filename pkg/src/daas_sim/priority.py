"""Map required SLA factors to one of six priority classes."""

from __future__ import annotations

from .core import PriorityClass, SlaFactors

# Factors guaranteed by each level, highest priority first. Each row strictly
# contains the next one.
PRIORITY_TABLE: tuple[frozenset[str], ...] = (
    frozenset({"throughput", "reliability", "durability", "agility", "security"}),
    frozenset({"throughput", "durability", "agility", "security"}),
    frozenset({"throughput", "agility", "security"}),
    frozenset({"throughput", "security"}),
    frozenset({"throughput"}),
    frozenset(),
)


def profile(level: int) -> SlaFactors:
    """The SLA factor profile that defines priority ``level`` exactly."""
    return SlaFactors.from_names(PRIORITY_TABLE[level - 1])


def classify(sla: SlaFactors) -> PriorityClass:
    """Lowest-priority class whose guaranteed factors cover every required factor.

    Combinations that match a table row get that row's class. Anything else is
    pushed up to the first class that still guarantees all of its requirements.
    """
    required = sla.required()
    for level in range(len(PRIORITY_TABLE), 0, -1):
        if required <= PRIORITY_TABLE[level - 1]:
            return PriorityClass(level)
    raise AssertionError("unreachable: level 1 guarantees every factor")
