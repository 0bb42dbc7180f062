"""Command-line front end for planning CNOT circuits on a distributed QPU cloud.

Exit codes: 0 success, 2 infeasible instance or plan, 3 invalid input,
4 internal limit (horizon exhausted, instance too large for the exact solver).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from .baselines import SaParams
from .circuit import (
    Circuit,
    build_precedence,
    dump_gate_list,
    parse_gate_list,
    parse_qasm_subset,
    random_circuit,
)
from .errors import InputError, UniqError
from .model import (
    ObjectiveWeights,
    compute_metrics,
    dump_plan,
    load_plan,
    validate,
)
from .network import TOPOLOGY_KINDS, dump_topology, gen_topology, load_topology
from .pipeline import Instance
from .scheduler import Budget, GenMode, epr_utilization, timeline

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_LIMIT = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_circuit(path: str) -> Circuit:
    text = _read(path)
    if path.endswith(".qasm") or not text.lstrip().startswith("{"):
        return parse_qasm_subset(text)
    return parse_gate_list(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def _config(args) -> bench_mod.PlannerConfig:
    return bench_mod.PlannerConfig(
        weights=ObjectiveWeights(args.alpha, args.beta),
        mode=GenMode(args.mode),
        budget=Budget(args.budget),
        horizon=args.horizon,
        sa=SaParams(iterations=args.sa_iterations, time_budget=args.sa_time_budget),
        literal_delta=args.literal_delta,
    )


def cmd_solve(args) -> int:
    inst = Instance(load_circuit(args.circuit), load_topology(_read(args.topology)))
    cfg = _config(args)
    plan, wall = bench_mod.run_planner(args.planner, inst, args.seed, cfg)
    report = validate(plan, inst.circuit, inst.dag, inst.topology, cfg.budget)
    metrics = compute_metrics(plan, inst.costs, cfg.weights, wall=wall)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "plan.json").write_text(dump_plan(plan, inst.circuit, inst.topology, cfg.budget),
                                   encoding="utf-8")
    (out / "validation.json").write_text(_dumps(report.to_doc()), encoding="utf-8")
    (out / "metrics.json").write_text(_dumps(metrics.to_doc()), encoding="utf-8")
    (out / "metrics.csv").write_text(
        bench_mod.to_csv([metrics.csv_row()], metrics.CSV_FIELDS), encoding="utf-8")
    sys.stdout.write(_dumps({"planner": args.planner, "feasible": report.feasible,
                             **metrics.csv_row()}))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_validate(args) -> int:
    plan, c, t, budget = load_plan(_read(args.plan))
    report = validate(plan, c, build_precedence(c), t, budget)
    _emit(_dumps(report.to_doc()), args.out)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_timeline(args) -> int:
    plan, c, t, budget = load_plan(_read(args.plan))
    report = validate(plan, c, build_precedence(c), t, budget)
    if not report.feasible:
        names = ", ".join(f"{k} ({report.to_doc()['constraints'][k]['name']})"
                          for k in report.failed())
        raise InputError(f"plan violates constraint(s) {names}")
    series = epr_utilization(plan.schedule) if any(plan.indicators.delta) else \
        {"generated": [], "consumed": []}
    doc = {"makespan": plan.schedule.makespan, "slots": timeline(plan.schedule), "epr": series}
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.what == "circuit":
        if args.preset:
            pr = bench_mod.PRESETS[args.preset]
            qubits, gates = pr.qubits, pr.gates
        else:
            if args.qubits is None or args.gates is None:
                raise InputError("gen circuit needs --qubits and --gates (or --preset)")
            qubits, gates = args.qubits, args.gates
        _emit(dump_gate_list(random_circuit(qubits, gates, args.seed)) + "\n", args.out)
    else:
        if args.n is None:
            raise InputError("gen topology needs --n")
        t = gen_topology(args.kind, args.n, args.cap, args.comm, seed=args.seed)
        _emit(dump_topology(t) + "\n", args.out)
    return EXIT_OK


def _parse_sweep(text: str | None):
    if not text:
        return None
    key, _, values = text.partition("=")
    vals = [v for v in values.split(",") if v]
    if not key or not vals:
        raise InputError(f"bad sweep argument {text!r}; expected KEY=v1,v2,...")
    if key not in ("comm", "cap", "qpus", "kind"):
        raise InputError(f"unknown sweep key {key!r}")
    return key, vals


def cmd_bench(args) -> int:
    planners = [p for p in (args.planners or "").split(",") if p]
    if not planners:
        raise InputError("planner list is empty")
    unknown = [p for p in planners if p not in bench_mod.PLANNERS]
    if unknown:
        raise InputError(f"unknown planner(s): {unknown}")
    cases = bench_mod.build_cases(args.preset or ["tiny"], args.repetitions, args.seed,
                                  kind=args.kind, qpus=args.qpus, sweep=_parse_sweep(args.sweep),
                                  cap=args.cap, comm=args.comm)
    records = bench_mod.run_bench(cases, planners, _config(args))
    summary = bench_mod.summarize(records)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "records.csv").write_text(bench_mod.records_csv(records), encoding="utf-8")
        (out / "summary.csv").write_text(bench_mod.to_csv(summary, bench_mod.SUMMARY_FIELDS),
                                         encoding="utf-8")
    sys.stdout.write(bench_mod.to_csv(summary, bench_mod.SUMMARY_FIELDS))
    return EXIT_OK


def _planner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0, help="weight of the time term")
    p.add_argument("--beta", type=float, default=1.0, help="weight of the communication term")
    p.add_argument("--mode", choices=[m.value for m in GenMode], default=GenMode.IN_SLOT.value)
    p.add_argument("--budget", choices=[b.value for b in Budget], default=Budget.STORED.value,
                   help="communication-qubit accounting rule")
    p.add_argument("--horizon", type=int, default=None, help="slot horizon (default: gate count)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sa-iterations", type=int, default=SaParams.iterations)
    p.add_argument("--sa-time-budget", type=float, default=SaParams.time_budget)
    p.add_argument("--literal-delta", action="store_true",
                   help="score placements only against qubits on the same QPU")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uniq-dqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="plan one circuit on one topology")
    p.add_argument("--circuit", required=True, help="gate-list JSON or QASM subset")
    p.add_argument("--topology", required=True)
    p.add_argument("--planner", choices=bench_mod.PLANNERS, default="uniq")
    p.add_argument("--out", required=True, help="output directory")
    _planner_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a plan file against all constraints")
    p.add_argument("plan")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("timeline", help="per-slot gate groups and EPR series of a plan")
    p.add_argument("plan")
    p.add_argument("--out")
    p.set_defaults(func=cmd_timeline)

    p = sub.add_parser("gen", help="generate a random circuit or a topology")
    p.add_argument("what", choices=["circuit", "topology"])
    p.add_argument("--qubits", type=int)
    p.add_argument("--gates", type=int)
    p.add_argument("--preset", choices=sorted(bench_mod.PRESETS))
    p.add_argument("--kind", choices=TOPOLOGY_KINDS, default="random")
    p.add_argument("--n", type=int)
    p.add_argument("--cap", type=int, default=20)
    p.add_argument("--comm", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="batch experiments over presets and sweeps")
    p.add_argument("--preset", action="append", choices=sorted(bench_mod.PRESETS))
    p.add_argument("--planners", default="uniq,random,average",
                   help="comma-separated subset of " + ",".join(bench_mod.PLANNERS))
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--sweep", help="KEY=v1,v2,... with KEY in comm, cap, qpus, kind")
    p.add_argument("--kind", choices=TOPOLOGY_KINDS, default="random")
    p.add_argument("--qpus", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--comm", type=int)
    p.add_argument("--out", help="directory for records.csv and summary.csv")
    _planner_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UniqError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return exc.exit_code
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": "InvalidArgument", "message": str(exc)}) + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
