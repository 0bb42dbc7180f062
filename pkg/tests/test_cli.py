import csv
import io
import json

import pytest

from uniq_dqc.cli import main
from uniq_dqc.model import load_plan


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def tiny_inputs(tmp_path, capsys):
    c, t = tmp_path / "c.json", tmp_path / "t.json"
    assert run_cli(capsys, "gen", "circuit", "--preset", "tiny", "--seed", 3, "--out", c)[0] == 0
    assert run_cli(capsys, "gen", "topology", "--n", 2, "--cap", 5, "--comm", 10,
                   "--seed", 3, "--out", t)[0] == 0
    return c, t


def test_gen_circuit_fifty(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "gen", "circuit", "--qubits", 50, "--gates", 50, "--seed", 7)
    doc = json.loads(out)
    assert code == 0 and doc["qubits"] == 50 and len(doc["gates"]) == 50


def test_gen_square_topology(capsys):
    code, out, _ = run_cli(capsys, "gen", "topology", "--kind", "square", "--n", 25)
    assert code == 0 and len(json.loads(out)["links"]) == 40


def test_gen_bad_node_count(capsys):
    code, _, err = run_cli(capsys, "gen", "topology", "--kind", "square", "--n", 24)
    assert code == 3 and json.loads(err)["error"] == "BadNodeCount"


def test_solve_tiny(tmp_path, capsys, tiny_inputs):
    c, t = tiny_inputs
    out = tmp_path / "out"
    code, stdout, _ = run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--out", out)
    assert code == 0
    summary = json.loads(stdout)
    assert summary["feasible"] and summary["algo_wall_time"] < 1.0
    for name in ("plan.json", "validation.json", "metrics.json", "metrics.csv"):
        assert (out / name).exists()
    assert json.loads((out / "validation.json").read_text())["feasible"] is True
    row = next(csv.DictReader(io.StringIO((out / "metrics.csv").read_text())))
    assert float(row["runtime_cx"]) == 12 * int(row["makespan_slots"])


def test_solve_is_deterministic(tmp_path, capsys, tiny_inputs):
    c, t = tiny_inputs
    for k in range(2):
        run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--planner", "random",
                "--seed", 5, "--out", tmp_path / f"o{k}")
    # metrics files carry wall time and are excluded
    for name in ("plan.json", "validation.json"):
        assert (tmp_path / "o0" / name).read_bytes() == (tmp_path / "o1" / name).read_bytes()


def test_solve_qasm_input(tmp_path, capsys, tiny_inputs):
    _, t = tiny_inputs
    src = tmp_path / "c.qasm"
    src.write_text("qreg q[4];\nh q[0];\ncx q[0],q[1];\ncx q[2],q[3];\ncx q[1],q[2];\n")
    code, stdout, _ = run_cli(capsys, "solve", "--circuit", src, "--topology", t,
                              "--out", tmp_path / "o")
    assert code == 0


def test_solve_infeasible_capacity(tmp_path, capsys):
    c, t = tmp_path / "c.json", tmp_path / "t.json"
    c.write_text(json.dumps({"qubits": 3, "gates": [[0, 1]]}))
    t.write_text(json.dumps({"nodes": [{"id": 0, "cap": 1, "comm": 1}, {"id": 1, "cap": 1, "comm": 1}],
                             "links": [[0, 1]]}))
    code, _, err = run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--out", tmp_path / "o")
    assert code == 2 and json.loads(err)["error"] == "Infeasible"


def test_solve_horizon_limit(tmp_path, capsys):
    c, t = tmp_path / "c.json", tmp_path / "t.json"
    c.write_text(json.dumps({"qubits": 2, "gates": [[0, 1], [0, 1]]}))
    t.write_text(json.dumps({"nodes": [{"id": 0, "cap": 2, "comm": 1}], "links": []}))
    code, _, err = run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--horizon", 1,
                           "--out", tmp_path / "o")
    assert code == 4 and json.loads(err)["error"] == "HorizonExhausted"


def test_solve_bad_input(tmp_path, capsys):
    c = tmp_path / "c.json"
    c.write_text('{"qubits": 2, "gates": [[0, 0]]}')
    code, _, err = run_cli(capsys, "solve", "--circuit", c, "--topology", c, "--out", tmp_path)
    assert code == 3 and json.loads(err)["error"] == "DuplicateOperand"


def test_exact_too_large_exit_code(tmp_path, capsys, tiny_inputs):
    c, t = tiny_inputs
    code, _, err = run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--planner", "exact",
                           "--out", tmp_path / "o")
    assert code == 4 and json.loads(err)["error"] == "TooLarge"


def test_validate_and_timeline(tmp_path, capsys, tiny_inputs):
    c, t = tiny_inputs
    run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--out", tmp_path / "o")
    plan_file = tmp_path / "o" / "plan.json"
    code, out, _ = run_cli(capsys, "validate", plan_file)
    assert code == 0 and json.loads(out)["feasible"]
    code, out, _ = run_cli(capsys, "timeline", plan_file)
    doc = json.loads(out)
    plan, *_ = load_plan(plan_file.read_text())
    assert code == 0 and len(doc["slots"]) == plan.schedule.makespan
    assert all(slot["gates"] for slot in doc["slots"])
    assert sum(doc["epr"]["consumed"]) == plan.indicators.remote_count


def test_timeline_all_local(tmp_path, capsys):
    c, t = tmp_path / "c.json", tmp_path / "t.json"
    c.write_text(json.dumps({"qubits": 3, "gates": [[0, 1], [1, 2]]}))
    t.write_text(json.dumps({"nodes": [{"id": 0, "cap": 3, "comm": 0}], "links": []}))
    run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--out", tmp_path / "o")
    code, out, _ = run_cli(capsys, "timeline", tmp_path / "o" / "plan.json")
    doc = json.loads(out)
    assert code == 0
    assert all(g["kind"] == "local" for s in doc["slots"] for g in s["gates"])
    assert doc["epr"] == {"generated": [], "consumed": []}


def test_invalid_plan_rejected(tmp_path, capsys, tiny_inputs):
    c, t = tiny_inputs
    run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--out", tmp_path / "o")
    plan_file = tmp_path / "o" / "plan.json"
    doc = json.loads(plan_file.read_text())
    for g in doc["schedule"]["gates"]:
        g["slot"] = 1
        g["epr_slot"] = 1 if g["epr_slot"] is not None else None
    plan_file.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "validate", plan_file)
    assert code == 2 and not json.loads(out)["feasible"]
    code, _, err = run_cli(capsys, "timeline", plan_file)
    assert code == 3 and "precedence" in json.loads(err)["message"]


def test_bench_records_and_summary(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "bench", "--preset", "tiny", "--planners", "uniq,random,average",
                           "--repetitions", 3, "--seed", 1, "--out", tmp_path)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "records.csv").read_text())))
    assert len(rows) == 9
    assert [r["planner"] for r in rows[:3]] == ["uniq", "random", "average"]
    summary = list(csv.DictReader(io.StringIO(out)))
    assert {r["planner"] for r in summary} == {"uniq", "random", "average"}
    assert all(r["feasible_runs"] == "3" for r in summary)


def test_bench_header_stable(tmp_path, capsys):
    run_cli(capsys, "bench", "--preset", "tiny", "--planners", "uniq", "--repetitions", 1,
            "--out", tmp_path / "a")
    run_cli(capsys, "bench", "--preset", "small", "--planners", "uniq", "--repetitions", 2,
            "--out", tmp_path / "b")
    head = lambda p: p.read_text().splitlines()[0]  # noqa: E731
    assert head(tmp_path / "a" / "records.csv") == head(tmp_path / "b" / "records.csv")


def test_bench_comm_sweep(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "bench", "--preset", "medium", "--planners", "uniq",
                           "--repetitions", 3, "--sweep", "comm=2,4,6,8,10")
    assert code == 0
    means = [float(r["mean_objective"]) for r in csv.DictReader(io.StringIO(out))]
    assert len(means) == 5
    assert sum(b <= a for a, b in zip(means, means[1:])) >= 3


def test_bench_records_failures(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "bench", "--preset", "tiny", "--planners", "uniq,exact",
                           "--repetitions", 1, "--out", tmp_path)
    rows = list(csv.DictReader(io.StringIO((tmp_path / "records.csv").read_text())))
    assert code == 0 and rows[1]["error"] == "TooLarge" and rows[1]["feasible"] == "False"


def test_bench_empty_planner_list(capsys):
    code, _, err = run_cli(capsys, "bench", "--planners", "")
    assert code == 3 and "empty" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve"])
    assert info.value.code == 3


def test_written_files_reread(tmp_path, capsys, tiny_inputs):
    c, t = tiny_inputs
    run_cli(capsys, "solve", "--circuit", c, "--topology", t, "--planner", "sa",
            "--sa-iterations", 20, "--out", tmp_path / "o")
    plan_file = tmp_path / "o" / "plan.json"
    plan, circ, topo, _ = load_plan(plan_file.read_text())
    (tmp_path / "c2.json").write_text(json.dumps(circ.to_doc()))
    (tmp_path / "t2.json").write_text(json.dumps(topo.to_doc()))
    code, *_ = run_cli(capsys, "solve", "--circuit", tmp_path / "c2.json", "--topology",
                       tmp_path / "t2.json", "--planner", "sa", "--sa-iterations", 20,
                       "--out", tmp_path / "o2")
    assert code == 0
    assert (tmp_path / "o2" / "plan.json").read_bytes() == plan_file.read_bytes()
