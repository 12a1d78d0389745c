"""Command-line front end: ``run``, ``compare`` and ``sweep``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import metrics as m
from .experiment import RunResult, run
from .scenario import ScenarioConfig, ScenarioError, load_scenario
from .scheduler import Discipline, SchedulerPolicy
from .workload import workload_digest

log = logging.getLogger("daas_sim")

DEFAULT_SEED = 1


def run_id(policy: str, seed: int, beta: float) -> str:
    return f"{policy}_seed{seed}_beta{beta!r}"


def run_config(config: ScenarioConfig) -> RunResult:
    return run(config.workload(), config.hosts(), config.policy(), config.overbooking(),
               config.stretch_limit)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_run(config: ScenarioConfig, out: Path) -> int:
    result = run_config(config)
    rid = run_id(config.discipline.value, config.seed, config.beta)
    _write(out / "trace.csv", result.trace.to_csv())
    _write(out / "metrics.csv", m.metrics_csv([(rid, result.metrics)]))
    log.info("wrote %s and %s", out / "trace.csv", out / "metrics.csv")
    return 0


def plot_rows(results: dict[str, RunResult]) -> str:
    lines = ["policy,priority_class,mean_wait_s"]
    for policy, result in results.items():
        for level in m.LEVELS:
            lines.append(f"{policy},{level},{result.metrics.per_class[level].mean_wait!r}")
    return "\n".join(lines) + "\n"


def cmd_compare(config: ScenarioConfig, out: Path) -> int:
    requests = None
    results: dict[str, RunResult] = {}
    for discipline in (Discipline.FIFO_BASELINE, Discipline.IRA_PRIORITY):
        cfg = config.replace(discipline=discipline)
        result = run(cfg.workload(), cfg.hosts(), SchedulerPolicy(discipline), cfg.overbooking(),
                     cfg.stretch_limit, requests=requests)
        requests = result.requests
        results[discipline.value] = result
    fifo, ira = results["fifo"], results["ira"]
    if workload_digest(fifo.requests) != workload_digest(ira.requests):
        raise RuntimeError("FIFO and IRA runs did not share a workload")

    report = m.compare(fifo.metrics, ira.metrics)
    for policy, result in results.items():
        _write(out / f"trace_{policy}.csv", result.trace.to_csv())
        _write(out / f"metrics_{policy}.csv", m.metrics_csv(
            [(run_id(policy, config.seed, config.beta), result.metrics)]))
    summary = {
        "seed": config.seed,
        "beta": config.beta,
        "workload_digest": fifo.metrics.workload_digest,
        "fifo": fifo.metrics.to_dict(),
        "ira": ira.metrics.to_dict(),
        "comparison": report.to_dict(),
    }
    _write(out / "comparison.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write(out / "plot_wait_by_class.csv", plot_rows(results))
    for level in m.LEVELS:
        row = report.per_class[level]
        log.info("P%d mean wait fifo=%.2f ira=%.2f  violation rate fifo=%.3f ira=%.3f", level,
                 row["baseline_mean_wait"], row["ira_mean_wait"],
                 row["baseline_violation_rate"], row["ira_violation_rate"])
    return 0


def _sweep_one(config: ScenarioConfig) -> tuple[str, m.RunMetrics]:
    result = run_config(config)
    return run_id(config.discipline.value, config.seed, config.beta), result.metrics


def cmd_sweep(config: ScenarioConfig, out: Path, seeds: list[int], betas: list[float],
              policies: list[Discipline], jobs: int = 1) -> int:
    configs = [
        config.replace(seed=seed, beta=beta, discipline=policy)
        for seed in seeds
        for beta in betas
        for policy in policies
    ]
    for cfg in configs:
        cfg.overbooking()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_sweep_one, configs))
    else:
        runs = [_sweep_one(cfg) for cfg in configs]
    _write(out / "sweep_metrics.csv", m.metrics_csv(runs))
    log.info("wrote %d runs to %s", len(runs), out / "sweep_metrics.csv")
    return 0


def _list(conv):
    def parse(text: str):
        try:
            return [conv(part) for part in text.split(",") if part.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="daas-sim",
        description="Simulate FIFO overbooking vs SLA-priority (IRA) allocation for DaaS hosts.",
    )
    parser.add_argument("command", choices=("run", "compare", "sweep"))
    parser.add_argument("--scenario", type=Path, help="scenario file (defaults apply if omitted)")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    parser.add_argument("--seeds", type=_list(int), help="sweep: comma-separated seeds")
    parser.add_argument("--betas", type=_list(float), help="sweep: comma-separated beta values")
    parser.add_argument("--policies", type=_list(Discipline),
                        help="sweep: comma-separated disciplines (default: the scenario's)")
    parser.add_argument("--jobs", type=int, default=1, help="sweep: parallel worker processes")
    parser.add_argument("-q", "--quiet", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        if args.scenario is not None:
            config = load_scenario(args.scenario)
        else:
            config = ScenarioConfig(seed=DEFAULT_SEED)
        if args.seed is not None:
            config = config.replace(seed=args.seed)
        out = args.out if args.out is not None else Path(config.output_dir)
        if args.command == "run":
            return cmd_run(config, out)
        if args.command == "compare":
            return cmd_compare(config, out)
        return cmd_sweep(
            config, out,
            seeds=args.seeds or [config.seed],
            betas=args.betas or [config.beta],
            policies=args.policies or [config.discipline],
            jobs=args.jobs,
        )
    except ScenarioError as exc:
        print(f"daas-sim: scenario error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"daas-sim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
