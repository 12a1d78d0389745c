import math

import pytest

from daas_sim.priority import classify
from daas_sim.workload import (
    UniformActualDemand,
    WorkloadError,
    WorkloadSpec,
    generate_workload,
    offered_load,
    workload_digest,
)


def test_same_seed_same_workload():
    a = generate_workload(WorkloadSpec(n_requests=50, seed=42))
    b = generate_workload(WorkloadSpec(n_requests=50, seed=42))
    assert a == b
    assert workload_digest(a) == workload_digest(b)
    assert workload_digest(a) != workload_digest(generate_workload(WorkloadSpec(n_requests=50, seed=43)))


def test_degenerate_mix_gives_single_class():
    reqs = generate_workload(WorkloadSpec(n_requests=40, class_mix=(1, 0, 0, 0, 0, 0), seed=3))
    assert {classify(r.sla).level for r in reqs} == {1}


def test_empty_workload():
    assert generate_workload(WorkloadSpec(n_requests=0)) == []


def test_generated_requests_respect_ranges():
    spec = WorkloadSpec(n_requests=500, seed=9)
    reqs = generate_workload(spec)
    arrivals = [r.arrival_time for r in reqs]
    assert arrivals == sorted(arrivals)
    for r in reqs:
        level = classify(r.sla).level
        assert r.deadline == spec.deadlines[level - 1]
        assert 1.0 <= r.avg_demand.cpu <= 3.0 and 1.0 <= r.avg_demand.mem <= 3.0
        assert r.avg_demand.cpu <= r.worst_demand.cpu <= 2 * r.avg_demand.cpu
    assert len({classify(r.sla).level for r in reqs}) == 6


def test_sample_means_track_parameters():
    spec = WorkloadSpec(n_requests=20000, arrival_rate=2.0, work_mean=5.0, seed=1)
    reqs = generate_workload(spec)
    mean_gap = reqs[-1].arrival_time / len(reqs)
    mean_work = math.fsum(r.nominal_work for r in reqs) / len(reqs)
    assert mean_gap == pytest.approx(0.5, rel=0.03)
    assert mean_work == pytest.approx(5.0, rel=0.03)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"arrival_rate": 0.0},
        {"work_mean": -1.0},
        {"class_mix": (0.5, 0.5, 0.1, 0, 0, 0)},
        {"class_mix": (1, 0, 0)},
        {"deadlines": (1, 2, 3, 4, 5, 0)},
        {"avg_cpu_range": (3.0, 1.0)},
        {"n_requests": -1},
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(WorkloadError):
        WorkloadSpec(**kwargs)


def test_actual_demand_is_per_request_and_bounded():
    reqs = generate_workload(WorkloadSpec(n_requests=100, seed=4))
    model = UniformActualDemand(4)
    for r in reqs:
        actual = model(r)
        assert r.avg_demand.le(actual) and actual.le(r.worst_demand)
        assert model(r) == actual
    assert [model(r) for r in reversed(reqs)][::-1] == [model(r) for r in reqs]


def test_offered_load_of_default_scenario():
    # mean reservation per component 2 * (1 + 0.5 * 0.5) = 2.5 over 32 units; 1.92 * 10 * 2.5 / 32
    assert offered_load(WorkloadSpec(), 8, 8, 4, 0.5) == pytest.approx(1.5)
