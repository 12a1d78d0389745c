import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from daas_sim.core import Request, ResourceVector, SlaFactors  # noqa: E402
from daas_sim.priority import profile  # noqa: E402


def make_request(rid, arrival=0.0, avg=(1.0, 1.0), worst=None, work=10.0, level=6,
                 deadline=100.0, sla=None):
    worst = avg if worst is None else worst
    return Request(
        id=rid,
        user_id=rid,
        arrival_time=arrival,
        sla=profile(level) if sla is None else sla,
        avg_demand=ResourceVector(*avg),
        worst_demand=ResourceVector(*worst),
        nominal_work=work,
        deadline=deadline,
    )


@pytest.fixture
def request_factory():
    return make_request


@pytest.fixture
def no_sla():
    return SlaFactors()


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def record(criterion: str, passed: bool, detail: str) -> bool:
    ACCEPTANCE_RESULTS[criterion] = (passed, detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
