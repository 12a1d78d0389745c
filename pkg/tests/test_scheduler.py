import pytest

from conftest import make_request
from daas_sim.core import Host, PriorityClass, ResourceVector
from daas_sim.overbooking import OverbookingPolicy, free_capacity, reserve
from daas_sim.scheduler import Discipline, PendingQueue, QueueError, dispatch, select_host

RV = ResourceVector
FIFO, IRA = Discipline.FIFO_BASELINE, Discipline.IRA_PRIORITY
NO_OVERBOOKING = OverbookingPolicy(1.0)


def hosts_with_free(*frees, capacity=(8, 8)):
    hosts = []
    for i, free in enumerate(frees):
        host = Host(i, RV(*capacity))
        used = RV(capacity[0] - free[0], capacity[1] - free[1])
        if used != RV(0, 0):
            reserve(host, -1, used)
        hosts.append(host)
    return hosts


@pytest.mark.parametrize(
    "frees, expected", [([(1, 1), (4, 4)], 1), ([(4, 4), (4, 4)], 0), ([(1, 1)], None)]
)
def test_select_host_first_fit(frees, expected):
    assert select_host(hosts_with_free(*frees), RV(2, 2)) == expected


def queue_of(discipline, *entries):
    q = PendingQueue(discipline)
    for rid, level, need in entries:
        q.enqueue(make_request(rid, avg=need, level=level), PriorityClass(level), 0.0)
    return q


def popped(q):
    return [q.pop().request.id for _ in range(len(q))]


def test_enqueue_and_duplicate():
    q = queue_of(FIFO, (0, 6, (1, 1)))
    assert len(q) == 1 and 0 in q
    with pytest.raises(QueueError):
        q.enqueue(make_request(0), PriorityClass(6), 0.0)


@pytest.mark.parametrize("discipline", [FIFO, IRA])
def test_same_priority_pops_in_arrival_order(discipline):
    q = queue_of(discipline, (0, 3, (1, 1)), (1, 3, (1, 1)))
    assert popped(q) == [0, 1]


def test_priority_order_only_under_ira():
    entries = ((0, 3, (1, 1)), (1, 1, (1, 1)))
    assert popped(queue_of(IRA, *entries)) == [1, 0]
    assert popped(queue_of(FIFO, *entries)) == [0, 1]


def test_pop_order_matches_pops():
    q = queue_of(IRA, (0, 6, (1, 1)), (1, 2, (1, 1)), (2, 2, (1, 1)), (3, 1, (1, 1)))
    expected = [e.request.id for e in q.pop_order()]
    assert popped(q) == expected == [3, 1, 2, 0]


def test_dispatch_places_and_reserves():
    hosts = hosts_with_free((4, 4))
    placed = dispatch(queue_of(FIFO, (0, 6, (2, 2))), hosts, NO_OVERBOOKING)
    assert [(p.entry.request.id, p.host_index) for p in placed] == [(0, 0)]
    assert free_capacity(hosts[0]) == RV(2, 2)


def test_fifo_head_of_line_blocking():
    q = queue_of(FIFO, (0, 6, (4, 4)), (1, 6, (1, 1)))
    assert dispatch(q, hosts_with_free((2, 2)), NO_OVERBOOKING) == []
    assert len(q) == 2


def test_ira_high_priority_blocks_lower():
    q = queue_of(IRA, (0, 1, (4, 4)), (1, 6, (1, 1)))
    assert dispatch(q, hosts_with_free((2, 2)), NO_OVERBOOKING) == []


def test_ira_places_high_priority_first():
    q = queue_of(IRA, (0, 6, (2, 2)), (1, 1, (2, 2)))
    placed = dispatch(q, hosts_with_free((4, 4)), NO_OVERBOOKING)
    assert [p.entry.request.id for p in placed] == [1, 0]


def test_dispatch_uses_overbooked_reservation():
    q = PendingQueue(FIFO)
    for rid in range(3):
        q.enqueue(make_request(rid, avg=(2, 2), worst=(4, 4)), PriorityClass(6), 0.0)
    assert len(dispatch(q, hosts_with_free((8, 8)), OverbookingPolicy(1.0))) == 2
    q2 = PendingQueue(FIFO)
    for rid in range(5):
        q2.enqueue(make_request(rid, avg=(2, 2), worst=(4, 4)), PriorityClass(6), 0.0)
    assert len(dispatch(q2, hosts_with_free((8, 8)), OverbookingPolicy(0.0))) == 4
