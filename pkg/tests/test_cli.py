import csv
import json

import pytest

from daas_sim.cli import main
from daas_sim.engine import TRACE_HEADER
from daas_sim.metrics import METRICS_HEADER

SMALL = """\
seed = 5
hosts.count = 2
workload.n_requests = 80
workload.arrival_rate = 1.5
"""


@pytest.fixture
def scenario(tmp_path):
    path = tmp_path / "small.scenario"
    path.write_text(SMALL)
    return path


def read(path):
    return path.read_bytes()


def test_run_is_byte_reproducible(scenario, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--scenario", str(scenario), "--out", str(a), "-q"]) == 0
    assert main(["run", "--scenario", str(scenario), "--out", str(b), "-q"]) == 0
    for name in ("trace.csv", "metrics.csv"):
        assert read(a / name) == read(b / name)
    assert (a / "trace.csv").read_text().splitlines()[0] == TRACE_HEADER
    assert (a / "metrics.csv").read_text().splitlines()[0] == ",".join(METRICS_HEADER)
    # rerunning into the same directory overwrites with identical bytes
    before = read(a / "trace.csv")
    main(["run", "--scenario", str(scenario), "--out", str(a), "-q"])
    assert read(a / "trace.csv") == before


def test_seed_override_changes_output(scenario, tmp_path):
    main(["run", "--scenario", str(scenario), "--out", str(tmp_path / "a"), "-q"])
    main(["run", "--scenario", str(scenario), "--seed", "6", "--out", str(tmp_path / "b"), "-q"])
    assert read(tmp_path / "a" / "trace.csv") != read(tmp_path / "b" / "trace.csv")


def test_compare_outputs(scenario, tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "--scenario", str(scenario), "--out", str(out), "-q"]) == 0
    for name in ("trace_fifo.csv", "trace_ira.csv", "metrics_fifo.csv", "metrics_ira.csv"):
        assert (out / name).exists()
    summary = json.loads((out / "comparison.json").read_text())
    assert summary["fifo"]["workload_digest"] == summary["ira"]["workload_digest"]
    assert set(summary["comparison"]["per_class"]) == {"1", "2", "3", "4", "5", "6"}
    with open(out / "plot_wait_by_class.csv") as fh:
        rows = list(csv.DictReader(fh))
    for policy in ("fifo", "ira"):
        points = [r for r in rows if r["policy"] == policy]
        assert [int(r["priority_class"]) for r in points] == [1, 2, 3, 4, 5, 6]


def test_degenerate_sweep_matches_run(scenario, tmp_path):
    main(["run", "--scenario", str(scenario), "--out", str(tmp_path / "r"), "-q"])
    main(["sweep", "--scenario", str(scenario), "--seeds", "5", "--betas", "0.5",
          "--out", str(tmp_path / "s"), "-q"])
    assert read(tmp_path / "r" / "metrics.csv") == read(tmp_path / "s" / "sweep_metrics.csv")


def test_sweep_order_is_independent_of_parallelism(scenario, tmp_path):
    args = ["sweep", "--scenario", str(scenario), "--seeds", "3,1", "--betas", "1,0.25",
            "--policies", "fifo,ira", "-q"]
    main(args + ["--out", str(tmp_path / "serial")])
    main(args + ["--out", str(tmp_path / "par"), "--jobs", "2"])
    serial = read(tmp_path / "serial" / "sweep_metrics.csv")
    assert serial == read(tmp_path / "par" / "sweep_metrics.csv")
    run_ids = []
    for line in serial.decode().splitlines()[1:]:
        rid = line.split(",")[0]
        if rid not in run_ids:
            run_ids.append(rid)
    assert run_ids == [
        "fifo_seed3_beta1.0", "ira_seed3_beta1.0", "fifo_seed3_beta0.25", "ira_seed3_beta0.25",
        "fifo_seed1_beta1.0", "ira_seed1_beta1.0", "fifo_seed1_beta0.25", "ira_seed1_beta0.25",
    ]


def test_scenario_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.scenario"
    bad.write_text("seed = 1\noverbooking.beta = 1.5\n")
    assert main(["run", "--scenario", str(bad), "--out", str(tmp_path)]) == 2
    assert "overbooking.beta" in capsys.readouterr().err


def test_missing_scenario_file(tmp_path):
    assert main(["run", "--scenario", str(tmp_path / "nope"), "--out", str(tmp_path), "-q"]) == 1


def test_bad_beta_in_sweep(scenario, tmp_path):
    assert main(["sweep", "--scenario", str(scenario), "--betas", "2",
                 "--out", str(tmp_path), "-q"]) == 1
