import numpy as np
import pytest

from conftest import line_topology, random_instance
from uniq_dqc.circuit import Circuit, build_precedence
from uniq_dqc.errors import HorizonExhausted, MappingMismatch
from uniq_dqc.mapper import Mapping, derive_indicators
from uniq_dqc.model import Plan, validate
from uniq_dqc.pipeline import Instance, plan_for_mapping, uniq_plan
from uniq_dqc.scheduler import Budget, GenMode, Schedule, epr_utilization, schedule, timeline


def run(pairs, n, assign, topo, mode=GenMode.IN_SLOT, budget=Budget.STORED, horizon=None):
    c = Circuit.from_pairs(n, pairs)
    m = Mapping(tuple(assign))
    return schedule(c, build_precedence(c), m, derive_indicators(m, c), topo, horizon, mode, budget)


def test_local_chain():
    sch, _ = run([(0, 1)] * 3, 2, [0, 0], line_topology(1, 2, 0))
    assert sch.tau == (1, 2, 3)
    assert sch.tgen == (None, None, None)


def test_independent_local_gates_share_slot_one():
    sch, _ = run([(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)], 10, [0] * 10, line_topology(1, 10, 0))
    assert sch.tau == (1,) * 5


@pytest.mark.parametrize("comm, tau", [(1, (1, 2)), (2, (1, 1))])
def test_parallel_remote_gates(comm, tau):
    sch, inv = run([(0, 1), (2, 3)], 4, [0, 1, 0, 1], line_topology(2, 2, comm))
    assert sch.tau == tau
    assert sch.tgen == tau
    assert inv.usage.max() <= comm


def test_latest_earlier_uses_previous_slot():
    # g1, g2 local on (0, 1) fill slots 1-2; g3 remote on (1, 2) can start at 3
    pairs = [(0, 1), (0, 1), (1, 2)]
    topo = line_topology(2, 2, 1)
    sch, _ = run(pairs, 3, [0, 0, 1], topo, GenMode.IN_SLOT)
    assert sch.tau == (1, 2, 3) and sch.tgen[2] == 3
    sch, inv = run(pairs, 3, [0, 0, 1], topo, GenMode.LATEST_EARLIER)
    assert sch.tau == (1, 2, 3) and sch.tgen[2] == 2
    # pair stored after slot 2, consumed in slot 3
    assert inv.s[0, 1, 2] == 1 and inv.s[0, 1, 3] == 0


def test_latest_earlier_blocked_slot():
    # q0, q1 on u0 and q2, q3 on u1, one communication qubit each
    pairs = [(1, 0), (1, 0), (0, 2), (1, 3)]
    topo = line_topology(2, 2, 1)
    assign = [0, 0, 1, 1]
    sch, _ = run(pairs, 4, assign, topo, GenMode.LATEST_EARLIER)
    # g3 starts at 3 and pre-generates in slot 2; the pair holds both QPUs over slots 2-3,
    # so g4 (t_min 3) moves to 4 and slot 3 is busy, leaving in-slot generation
    assert sch.tau == (1, 2, 3, 4)
    assert sch.tgen == (None, None, 2, 4)
    # counting generation events only, slot 3 still has a free generation
    sch, _ = run(pairs, 4, assign, topo, GenMode.LATEST_EARLIER, Budget.GENERATION)
    assert sch.tau == (1, 2, 3, 3)
    assert sch.tgen == (None, None, 2, 3)


def test_generation_rule_can_pre_generate_past_busy_slot():
    pairs = [(0, 2), (1, 3), (0, 1), (0, 1), (1, 2)]
    topo = line_topology(2, 2, 2)
    assign = [0, 0, 1, 1]
    c = Circuit.from_pairs(4, pairs)
    m = Mapping(tuple(assign))
    ind = derive_indicators(m, c)
    sch, inv = schedule(c, build_precedence(c), m, ind, topo, None,
                        GenMode.LATEST_EARLIER, Budget.GENERATION)
    # slot 1 generation budget is full (two pairs), so g5 pre-generates at slot 2 at best
    assert sch.tau[0] == 1 and sch.tau[1] == 1
    assert sch.tgen[4] < sch.tau[4]
    assert validate(Plan(m, sch, ind), c, build_precedence(c), topo, Budget.GENERATION).feasible


def test_horizon_exhausted():
    with pytest.raises(HorizonExhausted):
        run([(0, 1)], 2, [0, 1], line_topology(2, 1, 0))
    with pytest.raises(HorizonExhausted):
        run([(0, 1), (0, 1)], 2, [0, 0], line_topology(1, 2, 0), horizon=1)


def test_mapping_mismatch():
    c = Circuit.from_pairs(3, [(0, 1)])
    m = Mapping((0, 0))
    with pytest.raises(MappingMismatch):
        schedule(c, build_precedence(c), m, derive_indicators(Mapping((0, 0, 0)), c),
                 line_topology(1, 3, 1))


def test_utilization_examples():
    sch, _ = run([(0, 1)] * 3, 2, [0, 0], line_topology(1, 2, 0))
    assert epr_utilization(sch) == {"generated": [0, 0, 0], "consumed": [0, 0, 0]}
    sch, _ = run([(0, 1)], 2, [0, 1], line_topology(2, 1, 1))
    assert epr_utilization(sch) == {"generated": [1], "consumed": [1]}
    sch, _ = run([(0, 1), (2, 3)], 4, [0, 1, 0, 1], line_topology(2, 2, 1))
    assert epr_utilization(sch)["generated"] == [1, 1]


def test_timeline_groups():
    sch, _ = run([(0, 1), (2, 3), (1, 2)], 4, [0, 0, 1, 1], line_topology(2, 2, 1))
    tl = timeline(sch)
    assert tl[0] == {"slot": 1, "gates": [{"id": 1, "kind": "local"}, {"id": 2, "kind": "local"}]}
    assert tl[1] == {"slot": 2, "gates": [{"id": 3, "kind": "remote"}]}


def test_schedule_document_round_trip():
    sch, _ = run([(0, 1), (2, 3), (1, 2)], 4, [0, 0, 1, 1], line_topology(2, 2, 1))
    assert Schedule.from_doc(sch.to_doc()) == sch


ALL_MODES = [(m, b) for m in GenMode for b in Budget]


@pytest.mark.parametrize("mode, budget", ALL_MODES)
def test_random_instances_validate(mode, budget):
    for seed in range(150):
        inst = random_instance(seed)
        try:
            plan = uniq_plan(inst, horizon=3 * max(inst.circuit.m, 1), mode=mode, budget=budget)
        except HorizonExhausted:
            continue
        c = inst.circuit
        H = plan.schedule.horizon
        report = validate(plan, c, inst.dag, inst.topology, budget)
        assert report.feasible, (seed, report.failed())
        assert plan.schedule.probes <= c.m * H
        for a, b in inst.dag.edges:
            assert plan.schedule.tau[a - 1] < plan.schedule.tau[b - 1]


def test_inventory_recursion_and_usage():
    for seed in range(100):
        inst = random_instance(seed)
        c, t = inst.circuit, inst.topology
        plan = uniq_plan(inst, horizon=3 * max(c.m, 1), mode=GenMode.LATEST_EARLIER)
        _, inv = schedule(c, inst.dag, plan.mapping, plan.indicators, t,
                          plan.schedule.horizon, GenMode.LATEST_EARLIER)
        assert np.all(inv.s[:, :, 0] == 0)
        assert np.all(inv.s >= 0)
        assert np.all(inv.s.sum(axis=1)[:, 1:] <= np.array(t.comms)[:, None])
        assert np.all(inv.usage <= np.array(t.comms)[:, None])
        in_slot, inv2 = schedule(c, inst.dag, plan.mapping, plan.indicators, t)
        assert np.all(inv2.s == 0)


def test_modes_agree_when_budgets_never_bind():
    for seed in range(100):
        inst = random_instance(seed)
        roomy = Instance(inst.circuit, inst.topology.with_budgets(comm=2 * inst.circuit.m + 2))
        taus = {uniq_plan(roomy, mode=m, budget=b).schedule.tau for m, b in ALL_MODES}
        assert len(taus) == 1


def test_budget_relief_never_increases_makespan():
    for seed in range(300):
        inst = random_instance(seed, comm=1 + seed % 3)
        mapping = uniq_plan(inst).mapping
        for mode, budget in ALL_MODES:
            H = 4 * max(inst.circuit.m, 1)
            try:
                before = plan_for_mapping(inst, mapping, H, mode, budget).schedule.makespan
            except HorizonExhausted:
                continue
            more = Instance(inst.circuit, inst.topology.with_budgets(
                comm=inst.topology.comms[0] + 1))
            after = plan_for_mapping(more, mapping, H, mode, budget).schedule.makespan
            assert after <= before
