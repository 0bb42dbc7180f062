"""Reference planners: Random, Average, simulated annealing and an exhaustive exact solver."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import HorizonExhausted, Infeasible, TooLarge
from .mapper import Mapping, derive_indicators
from .model import ObjectiveWeights, Plan, objective
from .pipeline import Instance, plan_for_mapping
from .scheduler import Budget, GenMode, Schedule, jit_scan


def _horizon(inst: Instance, horizon: int | None) -> int:
    return inst.circuit.m if horizon is None else horizon


def _check_capacity(inst: Instance) -> None:
    total = sum(inst.topology.caps)
    if total < inst.circuit.num_qubits:
        raise Infeasible(f"total capacity {total} < {inst.circuit.num_qubits} qubits")


def random_topological_order(preds, succ, m: int, rng: np.random.Generator) -> list[int]:
    indeg = [len(preds[g]) for g in range(m + 1)]
    ready = [g for g in range(1, m + 1) if indeg[g] == 0]
    order = []
    while ready:
        g = ready.pop(int(rng.integers(len(ready))))
        order.append(g)
        for h in succ[g]:
            indeg[h] -= 1
            if indeg[h] == 0:
                ready.append(h)
    return order


def random_plan(inst: Instance, seed: int, horizon: int | None = None,
                mode: GenMode = GenMode.IN_SLOT, budget: Budget = Budget.STORED) -> Plan:
    """Random seat assignment, random precedence-respecting order, earliest-feasible slots."""
    _check_capacity(inst)
    c, t = inst.circuit, inst.topology
    rng = np.random.default_rng(seed)
    seats = np.repeat(np.arange(t.p), t.caps)
    assign = tuple(int(u) for u in rng.permutation(seats)[: c.num_qubits])
    mapping = Mapping(assign)
    ind = derive_indicators(mapping, c)
    preds = inst.dag.predecessors()
    order = random_topological_order(preds, inst.dag.successors(), c.m, rng)
    H = _horizon(inst, horizon)
    tau, tgen, _, probes = jit_scan(order, preds, ind.pair, t.comms, H, mode, budget)
    return Plan(mapping, Schedule(H, tuple(tau), tuple(tgen), probes), ind)


def round_robin_mapping(n: int, caps) -> Mapping:
    p = len(caps)
    remaining = list(caps)
    assign = []
    k = 0
    for q in range(n):
        for step in range(p):
            u = (k + step) % p
            if remaining[u] > 0:
                break
        else:
            raise Infeasible(f"no QPU has capacity left for qubit {q}")
        assign.append(u)
        remaining[u] -= 1
        k = u + 1
    return Mapping(tuple(assign))


def equal_shares(comm: int, partners: list[int]) -> dict[int, int]:
    """Split ``comm`` over sorted ``partners``: floor share, remainder to the lowest ids."""
    if not partners:
        return {}
    base, extra = divmod(comm, len(partners))
    return {v: base + (1 if r < extra else 0) for r, v in enumerate(sorted(partners))}


def average_plan(inst: Instance, horizon: int | None = None,
                 mode: GenMode = GenMode.IN_SLOT, budget: Budget = Budget.STORED) -> Plan:
    """Round-robin placement; each QPU's budget split equally over the peers it talks to."""
    _check_capacity(inst)
    c, t = inst.circuit, inst.topology
    mapping = round_robin_mapping(c.num_qubits, t.caps)
    ind = derive_indicators(mapping, c)
    partners: dict[int, set[int]] = {u: set() for u in range(t.p)}
    for pr in ind.pair:
        if pr is not None:
            partners[pr[0]].add(pr[1])
            partners[pr[1]].add(pr[0])
    shares = {u: equal_shares(t.comms[u], sorted(partners[u])) for u in range(t.p)}
    pair_caps = {}
    for pr in set(p for p in ind.pair if p is not None):
        u, v = pr
        pair_caps[pr] = min(shares[u][v], shares[v][u])
    H = _horizon(inst, horizon)
    order = range(1, c.m + 1)
    tau, tgen, _, probes = jit_scan(order, inst.dag.predecessors(), ind.pair, t.comms, H,
                                    mode, budget, pair_caps=pair_caps)
    return Plan(mapping, Schedule(H, tuple(tau), tuple(tgen), probes), ind)


@dataclass(frozen=True)
class SaParams:
    initial_temp: float | None = None  # None: 10 x |initial objective|
    cooling_rate: float = 0.995
    iterations: int = 2000
    time_budget: float = 600.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")


def _neighbor(assign: list[int], caps, rng: np.random.Generator) -> list[int] | None:
    n, p = len(assign), len(caps)
    load = [0] * p
    for u in assign:
        load[u] += 1
    if rng.random() < 0.5:
        a, b = (int(x) for x in rng.choice(n, size=2, replace=False)) if n >= 2 else (0, 0)
        if n >= 2 and assign[a] != assign[b]:
            new = list(assign)
            new[a], new[b] = new[b], new[a]
            return new
    q = int(rng.integers(n)) if n else 0
    spare = [u for u in range(p) if u != assign[q] and load[u] < caps[u]] if n else []
    if not spare:
        return None
    new = list(assign)
    new[q] = spare[int(rng.integers(len(spare)))]
    return new


def sa_improve(initial: Plan, inst: Instance, w: ObjectiveWeights = ObjectiveWeights(),
               params: SaParams = SaParams(), horizon: int | None = None,
               mode: GenMode = GenMode.IN_SLOT, budget: Budget = Budget.STORED,
               history: list[float] | None = None) -> Plan:
    """Metropolis search over mappings; every candidate is rescheduled by the JIT scan.

    Returns the best plan seen. Stops after ``params.iterations`` moves or once
    ``params.time_budget`` seconds have elapsed. If ``history`` is given, the
    best objective after each iteration is appended to it.
    """
    rng = np.random.default_rng(params.seed)
    caps = inst.topology.caps
    H = initial.schedule.horizon if horizon is None else horizon
    cur_assign = list(initial.mapping.assign)
    cur_obj = objective(initial, inst.costs, w)
    best, best_obj = initial, cur_obj
    temp = params.initial_temp if params.initial_temp is not None else 10.0 * abs(cur_obj)
    temp = temp or 1.0
    start = time.perf_counter()
    for _ in range(params.iterations):
        if time.perf_counter() - start > params.time_budget:
            break
        cand = _neighbor(cur_assign, caps, rng)
        if cand is not None:
            try:
                plan = plan_for_mapping(inst, Mapping(tuple(cand)), H, mode, budget)
            except HorizonExhausted:
                plan = None
            if plan is not None:
                obj = objective(plan, inst.costs, w)
                d = obj - cur_obj
                if d < 0 or rng.random() < math.exp(-d / temp):
                    cur_assign, cur_obj = cand, obj
                    if obj < best_obj:
                        best, best_obj = plan, obj
        temp *= params.cooling_rate
        if history is not None:
            history.append(best_obj)
    return best


@dataclass(frozen=True)
class ExactLimits:
    max_qubits: int = 6
    max_gates: int = 6
    max_qpus: int = 3


def exact_solve(inst: Instance, w: ObjectiveWeights = ObjectiveWeights(),
                horizon: int | None = None, limits: ExactLimits = ExactLimits()) -> Plan:
    """Globally optimal plan by enumeration with branch-and-bound.

    Every capacity-feasible mapping is tried in lexicographic order; for each,
    execution slots are searched depth-first in program order. EPR pairs are
    generated in the execution slot, which loses nothing under the stored-pair
    budget. Ties keep the lexicographically first ``(mapping, slots)``.
    """
    c, t = inst.circuit, inst.topology
    n, m, p = c.num_qubits, c.m, t.p
    if n > limits.max_qubits or m > limits.max_gates or p > limits.max_qpus:
        raise TooLarge(f"instance ({n} qubits, {m} gates, {p} QPUs) exceeds exact limits "
                       f"({limits.max_qubits}, {limits.max_gates}, {limits.max_qpus})")
    _check_capacity(inst)
    H = _horizon(inst, horizon)
    preds = inst.dag.predecessors()
    costs = inst.costs
    comms = t.comms
    caps = t.caps

    asap = [0] * (m + 1)
    for g in range(1, m + 1):
        asap[g] = 1 + max((asap[h] for h in preds[g]), default=0)
    # suffix sums of ASAP slots: lower bound on the time term of unscheduled gates
    rest = [0] * (m + 2)
    for g in range(m, 0, -1):
        rest[g] = rest[g + 1] + asap[g]

    best_obj = math.inf
    best: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    for assign in itertools.product(range(p), repeat=n):
        load = [0] * p
        for u in assign:
            load[u] += 1
        if any(load[u] > caps[u] for u in range(p)):
            continue
        pairs = []
        comm = 0
        for g in c.gates:
            u, v = assign[g.control], assign[g.target]
            if u == v:
                pairs.append(None)
            else:
                pairs.append((u, v))
                comm += int(costs[u, v])
        base = w.beta * comm
        if base + w.alpha * rest[1] >= best_obj:
            continue
        occ = [[0] * (H + 2) for _ in range(p)]
        tau = [0] * (m + 1)

        def dfs(g: int, acc: float) -> None:
            nonlocal best_obj, best
            if g > m:
                if base + acc < best_obj:
                    best_obj = base + acc
                    best = (assign, tuple(tau[1:]))
                return
            lo = 1 + max((tau[h] for h in preds[g]), default=0)
            pr = pairs[g - 1]
            for s in range(lo, H + 1):
                if base + acc + w.alpha * (s + rest[g + 1]) >= best_obj:
                    return
                if pr is not None:
                    a, b = pr
                    if occ[a][s] >= comms[a] or occ[b][s] >= comms[b]:
                        continue
                    occ[a][s] += 1
                    occ[b][s] += 1
                tau[g] = s
                dfs(g + 1, acc + w.alpha * s)
                if pr is not None:
                    occ[a][s] -= 1
                    occ[b][s] -= 1

        dfs(1, 0.0)

    if best is None:
        raise Infeasible("no capacity-feasible mapping admits a schedule within the horizon")
    mapping = Mapping(tuple(best[0]))
    ind = derive_indicators(mapping, c)
    tgen = tuple(s if d else None for s, d in zip(best[1], ind.delta))
    return Plan(mapping, Schedule(H, best[1], tgen), ind)
