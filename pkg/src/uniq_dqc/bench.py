"""Workload presets, planner dispatch and batch benchmarking.

Seeds are split deterministically: instance ``i`` of a run with base seed
``s`` is generated from ``s + i`` and planner number ``k`` (position in the
planner list) on that instance runs with seed ``s + i + k``.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, field
from statistics import mean
from typing import Any, Iterable

from .baselines import ExactLimits, SaParams, average_plan, exact_solve, random_plan, sa_improve
from .circuit import random_circuit
from .errors import UniqError
from .model import ObjectiveWeights, Plan, compute_metrics, validate
from .network import gen_topology
from .pipeline import Instance, uniq_plan
from .scheduler import Budget, GenMode

PLANNERS = ("uniq", "random", "average", "sa", "exact")


@dataclass(frozen=True)
class BenchPreset:
    name: str
    gates: int
    qubits: int
    qpus: int
    cap: int
    comm: int


PRESETS = {
    "tiny": BenchPreset("tiny", 10, 10, 2, 5, 10),
    "small": BenchPreset("small", 20, 15, 3, 5, 10),
    "medium": BenchPreset("medium", 50, 32, 4, 8, 10),
    "large": BenchPreset("large", 100, 60, 5, 12, 10),
}


def preset_instance(preset: BenchPreset, seed: int, kind: str = "random",
                    qpus: int | None = None, cap: int | None = None,
                    comm: int | None = None) -> Instance:
    """Random circuit of the preset's size on a generated cloud; overrides replace preset values."""
    c = random_circuit(preset.qubits, preset.gates, seed)
    t = gen_topology(kind, qpus or preset.qpus, preset.cap if cap is None else cap,
                     preset.comm if comm is None else comm, seed=seed)
    return Instance(c, t)


@dataclass(frozen=True)
class PlannerConfig:
    weights: ObjectiveWeights = ObjectiveWeights()
    mode: GenMode = GenMode.IN_SLOT
    budget: Budget = Budget.STORED
    horizon: int | None = None
    sa: SaParams = SaParams()
    exact: ExactLimits = ExactLimits()
    literal_delta: bool = False


def run_planner(name: str, inst: Instance, seed: int = 0,
                cfg: PlannerConfig = PlannerConfig()) -> tuple[Plan, float]:
    """Run one planner; returns the plan and its wall time in seconds."""
    start = time.perf_counter()
    if name == "uniq":
        plan = uniq_plan(inst, cfg.horizon, cfg.mode, cfg.budget, cfg.literal_delta)
    elif name == "random":
        plan = random_plan(inst, seed, cfg.horizon, cfg.mode, cfg.budget)
    elif name == "average":
        plan = average_plan(inst, cfg.horizon, cfg.mode, cfg.budget)
    elif name == "sa":
        init = uniq_plan(inst, cfg.horizon, cfg.mode, cfg.budget, cfg.literal_delta)
        sa = SaParams(cfg.sa.initial_temp, cfg.sa.cooling_rate, cfg.sa.iterations,
                      cfg.sa.time_budget, seed)
        plan = sa_improve(init, inst, cfg.weights, sa, cfg.horizon, cfg.mode, cfg.budget)
    elif name == "exact":
        plan = exact_solve(inst, cfg.weights, cfg.horizon, cfg.exact)
    else:
        raise ValueError(f"unknown planner {name!r}")
    return plan, time.perf_counter() - start


@dataclass
class BenchRecord:
    preset: str
    instance: int
    sweep: str
    value: str
    planner: str
    seed: int
    objective: float | None = None
    makespan_slots: int | None = None
    runtime_cx: float | None = None
    remote_gates: int | None = None
    algo_wall_time: float | None = None
    feasible: bool = False
    error: str = ""


RECORD_FIELDS = tuple(BenchRecord.__dataclass_fields__)


@dataclass
class BenchCase:
    preset: str
    instance: int
    seed: int
    inst: Instance
    sweep: str = ""
    value: str = ""
    extra: dict[str, Any] = field(default_factory=dict)


def build_cases(presets: Iterable[str], repetitions: int, seed: int, kind: str = "random",
                qpus: int | None = None, sweep: tuple[str, list[str]] | None = None,
                cap: int | None = None, comm: int | None = None) -> list[BenchCase]:
    """Instances for every (preset, sweep value, repetition); sweeps reuse the same workload seeds."""
    cases = []
    key, values = sweep if sweep else ("", [""])
    for name in presets:
        preset = PRESETS[name]
        for value in values:
            over = {"kind": kind, "qpus": qpus, "cap": cap, "comm": comm}
            if key in ("cap", "comm", "qpus"):
                over[key] = int(value)
            elif key == "kind":
                over["kind"] = value
            elif key:
                raise ValueError(f"unknown sweep key {key!r}")
            for rep in range(repetitions):
                s = seed + rep
                cases.append(BenchCase(name, rep, s, preset_instance(preset, s, **over), key, value))
    return cases


def run_bench(cases: list[BenchCase], planners: list[str],
              cfg: PlannerConfig = PlannerConfig()) -> list[BenchRecord]:
    """One record per (case, planner). Planner failures are recorded, not raised."""
    if not planners:
        raise ValueError("planner list is empty")
    records = []
    for case in cases:
        for k, name in enumerate(planners):
            rec = BenchRecord(case.preset, case.instance, case.sweep, case.value, name, case.seed + k)
            try:
                plan, wall = run_planner(name, case.inst, case.seed + k, cfg)
                report = validate(plan, case.inst.circuit, case.inst.dag, case.inst.topology,
                                  cfg.budget)
                met = compute_metrics(plan, case.inst.costs, cfg.weights, wall=wall)
                rec.objective = met.objective
                rec.makespan_slots = met.makespan_slots
                rec.runtime_cx = met.runtime_cx
                rec.remote_gates = met.remote_gates
                rec.algo_wall_time = round(wall, 6)
                rec.feasible = report.feasible
                if not report.feasible:
                    rec.error = "Invalid:" + ",".join(report.failed())
            except UniqError as exc:
                rec.error = type(exc).__name__
            records.append(rec)
    return records


def summarize(records: list[BenchRecord]) -> list[dict[str, Any]]:
    """Mean metrics per (preset, sweep value, planner) over feasible records."""
    groups: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.preset, r.sweep, r.value, r.planner), []).append(r)
    out = []
    for (preset, sweep, value, planner), rs in groups.items():
        ok = [r for r in rs if r.feasible]
        row = {"preset": preset, "sweep": sweep, "value": value, "planner": planner,
               "runs": len(rs), "feasible_runs": len(ok)}
        for f in ("objective", "makespan_slots", "runtime_cx", "remote_gates", "algo_wall_time"):
            row["mean_" + f] = round(mean(getattr(r, f) for r in ok), 6) if ok else ""
        out.append(row)
    return out


SUMMARY_FIELDS = ("preset", "sweep", "value", "planner", "runs", "feasible_runs",
                  "mean_objective", "mean_makespan_slots", "mean_runtime_cx",
                  "mean_remote_gates", "mean_algo_wall_time")


def to_csv(rows: list[dict[str, Any]], fields) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\r\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def records_csv(records: list[BenchRecord]) -> str:
    return to_csv([asdict(r) for r in records], RECORD_FIELDS)
