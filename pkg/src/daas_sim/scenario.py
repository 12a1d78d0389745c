"""Flat ``key = value`` scenario files."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .core import ResourceVector
from .engine import HostConfig
from .metrics import DEFAULT_STRETCH_LIMIT
from .overbooking import OverbookingPolicy
from .scheduler import Discipline, SchedulerPolicy
from .workload import DEFAULT_DEADLINES, WorkloadError, WorkloadSpec


class ScenarioError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None) -> None:
        self.key = key
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    hosts_count: int = 4
    capacity_cpu: float = 8.0
    capacity_mem: float = 8.0
    beta: float = 0.5
    discipline: Discipline = Discipline.IRA_PRIORITY
    n_requests: int = 600
    arrival_rate: float = 1.92
    work_mean: float = 10.0
    avg_cpu_range: tuple[float, float] = (1.0, 3.0)
    avg_mem_range: tuple[float, float] = (1.0, 3.0)
    uplift_cpu_range: tuple[float, float] = (0.0, 1.0)
    uplift_mem_range: tuple[float, float] = (0.0, 1.0)
    class_mix: tuple[float, ...] = (1 / 6,) * 6
    deadlines: tuple[float, ...] = DEFAULT_DEADLINES
    stretch_limit: float = DEFAULT_STRETCH_LIMIT
    output_dir: str = field(default="out")

    def workload(self) -> WorkloadSpec:
        return WorkloadSpec(
            n_requests=self.n_requests,
            arrival_rate=self.arrival_rate,
            work_mean=self.work_mean,
            avg_cpu_range=self.avg_cpu_range,
            avg_mem_range=self.avg_mem_range,
            uplift_cpu_range=self.uplift_cpu_range,
            uplift_mem_range=self.uplift_mem_range,
            deadlines=self.deadlines,
            class_mix=self.class_mix,
            seed=self.seed,
        )

    def hosts(self) -> HostConfig:
        return HostConfig(self.hosts_count, ResourceVector(self.capacity_cpu, self.capacity_mem))

    def policy(self) -> SchedulerPolicy:
        return SchedulerPolicy(self.discipline)

    def overbooking(self) -> OverbookingPolicy:
        return OverbookingPolicy(self.beta)

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)


def _int(text: str) -> int:
    return int(text, 10)


def _positive(conv):
    def parse(text: str):
        value = conv(text)
        if not value > 0:
            raise ValueError("must be positive")
        return value
    return parse


def _non_negative(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise ValueError("must be >= 0")
    return value


def _unit(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise ValueError("must lie in [0, 1]")
    return value


def _discipline(text: str) -> Discipline:
    try:
        return Discipline(text.lower())
    except ValueError:
        raise ValueError("must be one of: fifo, ira") from None


def _mix(text: str) -> tuple[float, ...]:
    values = tuple(float(v) for v in text.split(","))
    if len(values) != 6 or any(v < 0 for v in values):
        raise ValueError("must be six comma-separated non-negative weights")
    return values


# scenario key -> (config field, converter); paired range keys fill one slot of a tuple.
_SCALAR_KEYS = {
    "seed": ("seed", _int),
    "hosts.count": ("hosts_count", _positive(_int)),
    "hosts.capacity_cpu": ("capacity_cpu", _positive(float)),
    "hosts.capacity_mem": ("capacity_mem", _positive(float)),
    "overbooking.beta": ("beta", _unit),
    "policy.discipline": ("discipline", _discipline),
    "workload.n_requests": ("n_requests", _positive(_int)),
    "workload.arrival_rate": ("arrival_rate", _positive(float)),
    "workload.work_mean": ("work_mean", _positive(float)),
    "workload.class_mix": ("class_mix", _mix),
    "sla.stretch_limit": ("stretch_limit", _positive(float)),
    "output.dir": ("output_dir", str),
}
_RANGE_KEYS = {
    f"workload.{prefix}_{res}_{end}": (f"{prefix}_{res}_range", slot)
    for prefix in ("avg", "uplift")
    for res in ("cpu", "mem")
    for slot, end in enumerate(("min", "max"))
}
_DEADLINE_KEYS = {f"sla.deadline_p{k}": k - 1 for k in range(1, 7)}

KNOWN_KEYS = tuple(_SCALAR_KEYS) + tuple(_RANGE_KEYS) + tuple(_DEADLINE_KEYS)
REQUIRED_KEYS = ("seed",)


def parse_scenario(text: str) -> ScenarioConfig:
    values: dict[str, object] = {}
    ranges: dict[str, list[float]] = {}
    deadlines = list(DEFAULT_DEADLINES)
    seen: dict[str, int] = {}
    defaults = {f.name: f.default for f in dataclasses.fields(ScenarioConfig)}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ScenarioError(f"duplicate key {key!r} (first set on line {seen[key]})", key, lineno)
        seen[key] = lineno
        try:
            if key in _SCALAR_KEYS:
                name, conv = _SCALAR_KEYS[key]
                values[name] = conv(value)
            elif key in _RANGE_KEYS:
                name, slot = _RANGE_KEYS[key]
                ranges.setdefault(name, list(defaults[name]))[slot] = _non_negative(value)
            elif key in _DEADLINE_KEYS:
                deadlines[_DEADLINE_KEYS[key]] = _positive(float)(value)
            else:
                raise ScenarioError(f"unknown key {key!r}", key, lineno)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(f"invalid value for {key!r}: {value!r} ({exc})", key, lineno) from None

    for key in REQUIRED_KEYS:
        if key not in seen:
            raise ScenarioError(f"missing required key {key!r}", key)
    for name, (lo, hi) in ranges.items():
        if lo > hi:
            keys = [k for k, (n, _) in _RANGE_KEYS.items() if n == name]
            line = max(seen.get(k, 0) for k in keys)
            raise ScenarioError(f"{keys[0]} exceeds {keys[1]}", keys[1], line)
        values[name] = (lo, hi)
    values["deadlines"] = tuple(deadlines)

    config = ScenarioConfig(**values)
    try:
        config.workload()
    except WorkloadError as exc:
        key = "workload.class_mix" if "class_mix" in str(exc) else None
        prefix = f"{key}: " if key else ""
        raise ScenarioError(f"{prefix}{exc}", key, seen.get(key) if key else None) from None
    return config


def load_scenario(path: str | Path) -> ScenarioConfig:
    return parse_scenario(Path(path).read_text())


def format_scenario(config: ScenarioConfig) -> str:
    """Render ``config`` as a scenario file that parses back to an equal config."""
    lines = []
    for key, (name, _) in _SCALAR_KEYS.items():
        value = getattr(config, name)
        if isinstance(value, Discipline):
            value = value.value
        elif isinstance(value, tuple):
            value = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    for key, (name, slot) in _RANGE_KEYS.items():
        lines.append(f"{key} = {getattr(config, name)[slot]!r}")
    for key, index in _DEADLINE_KEYS.items():
        lines.append(f"{key} = {config.deadlines[index]!r}")
    return "\n".join(lines) + "\n"
